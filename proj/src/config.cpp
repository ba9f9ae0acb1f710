#include "twostrain/config.hpp"

#include "twostrain/error.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace twostrain {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::set<std::string> kFieldPresets = {"constant", "beta_seasonal", "beta_a0b0"};

// Walks a YAML tree, collecting problems instead of stopping at the first one.
class Reader {
public:
    std::vector<std::string> problems;

    void fail(const YAML::Node& node, const std::string& what) {
        const auto m = node.Mark();
        if (m.line >= 0) {
            problems.push_back("line " + std::to_string(m.line + 1) + ": " + what);
        } else {
            problems.push_back(what);
        }
    }

    // Checks that `node` is a map with keys drawn from `allowed`.
    bool map(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
        if (!node.IsMap()) {
            fail(node, path + ": expected a mapping");
            return false;
        }
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, path + "." + key + ": unknown key");
        }
        return true;
    }

    template <class T>
    void get(const YAML::Node& parent, const std::string& key, const std::string& path, T& out) {
        const auto node = parent[key];
        if (!node) return;
        try {
            out = node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, path + "." + key + ": cannot convert '" + scalar(node) + "'");
        }
    }

    void get_size(const YAML::Node& parent, const std::string& key, const std::string& path,
                  std::size_t& out) {
        const auto node = parent[key];
        if (!node) return;
        long long v = 0;
        try {
            v = node.as<long long>();
        } catch (const YAML::Exception&) {
            fail(node, path + "." + key + ": expected an integer, got '" + scalar(node) + "'");
            return;
        }
        if (v < 0) {
            fail(node, path + "." + key + ": must be nonnegative");
            return;
        }
        out = static_cast<std::size_t>(v);
    }

    void field(const YAML::Node& parent, const std::string& key, const std::string& path, FieldSpec& out) {
        const auto node = parent[key];
        if (!node) return;
        const std::string here = path + "." + key;
        if (node.IsScalar()) {  // shorthand: a bare number is a constant
            out = FieldSpec{};
            get(parent, key, path, out.value);
            return;
        }
        if (!map(node, here, {"preset", "value", "a0", "b0", "scale", "profile"})) return;
        get(node, "preset", here, out.preset);
        if (!kFieldPresets.count(out.preset)) fail(node["preset"], here + ".preset: unknown preset '" + out.preset + "'");
        get(node, "value", here, out.value);
        get(node, "a0", here, out.a0);
        get(node, "b0", here, out.b0);
        get(node, "scale", here, out.scale);
        if (const auto prof = node["profile"]) {
            if (map(prof, here + ".profile", {"amplitude", "wavenumber"})) {
                get(prof, "amplitude", here + ".profile", out.profile.amplitude);
                get(prof, "wavenumber", here + ".profile", out.profile.wavenumber);
            }
        }
    }

    void optional_level(const YAML::Node& parent, const std::string& key, const std::string& path,
                        std::optional<double>& out) {
        const auto node = parent[key];
        if (!node) return;
        if (node.IsScalar() && scalar(node) == "solve") {
            out.reset();
            return;
        }
        double v = 0.0;
        try {
            v = node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, path + "." + key + ": expected a number or 'solve'");
            return;
        }
        out = v;
    }

private:
    static std::string scalar(const YAML::Node& node) { return node.IsScalar() ? node.Scalar() : "<non-scalar>"; }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_field(std::ostream& os, const std::string& indent, const std::string& key, const FieldSpec& f) {
    os << indent << key << ":\n";
    os << indent << "  preset: " << f.preset << "\n";
    os << indent << "  value: " << num(f.value) << "\n";
    os << indent << "  a0: " << num(f.a0) << "\n";
    os << indent << "  b0: " << num(f.b0) << "\n";
    os << indent << "  scale: " << num(f.scale) << "\n";
    os << indent << "  profile: {amplitude: " << num(f.profile.amplitude)
       << ", wavenumber: " << num(f.profile.wavenumber) << "}\n";
}

}  // namespace

CoefficientField FieldSpec::build(double period) const {
    CoefficientField f = CoefficientField::constant(0.0);
    if (preset == "constant") {
        f = CoefficientField::constant(value, period, profile);
    } else if (preset == "beta_seasonal" || preset == "beta_a0b0") {
        const auto base = preset == "beta_seasonal" ? seasonal_beta_preset() : seasonal_beta_two_param(a0, b0);
        if (period != base.period()) throw InvalidArgument("seasonal presets are defined for a 12-month period");
        f = CoefficientField::fourier(base.mean(), base.harmonics(), period, profile);
    } else {
        throw InvalidArgument("unknown coefficient preset '" + preset + "'");
    }
    return scale == 1.0 ? f : f.scaled(scale);
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
    return dump_config(*this) == dump_config(other);
}

std::vector<std::string> preset_names() { return {"baseline", "case1", "case2", "case3"}; }

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig c;
    c.name = name;
    c.preset = name;
    // The baseline carries no strain data of its own; it uses the Case 1 line.
    const std::map<std::string, std::array<StrainParams, 2>> cases = {
        {"baseline", {StrainParams{0.096, 0.56, 0.25}, StrainParams{0.082, 0.6, 0.2}}},
        {"case1", {StrainParams{0.096, 0.56, 0.25}, StrainParams{0.082, 0.6, 0.2}}},
        {"case2", {StrainParams{0.083, 0.35, 0.2}, StrainParams{0.082, 0.55, 0.1}}},
        {"case3", {StrainParams{0.096, 0.55, 0.15}, StrainParams{0.082, 0.45, 0.2}}},
    };
    const auto it = cases.find(name);
    if (it == cases.end()) throw ConfigError({"unknown preset '" + name + "'"});
    c.strains = it->second;
    if (name == "case2" || name == "case3") {
        c.periods = 200;
        c.burn_in_periods = 150;
    }
    c.output_dir = "out/" + name;
    return c;
}

std::vector<std::string> validate(const ScenarioConfig& c) {
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    need(c.nodes >= 3, "grid.nodes: requires n >= 3 (got " + std::to_string(c.nodes) + ")");
    need(c.length > 0.0, "grid.length: must be positive");
    need(c.steps_per_period > 0, "time.steps_per_period: must be positive");
    need(c.period > 0.0, "time.period: must be positive");
    need(c.burn_in_periods <= c.periods, "time.burn_in_periods: cannot exceed time.periods");
    need(c.diffusion_h >= 0.0 && c.diffusion_v >= 0.0, "model.diffusion_h/diffusion_v: must be nonnegative");
    need(c.death >= 0.0, "model.death: must be nonnegative");
    need(c.l > 0.0 && c.p >= c.l, "model.p/model.l: requires p >= l > 0 (got p=" + num(c.p) + ", l=" + num(c.l) + ")");
    need(c.p <= 1.0, "model.p: must be at most 1");
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& s = c.strains[i];
        const std::string path = "model.strains[" + std::to_string(i) + "]";
        need(s.gamma > 0.0, path + ".gamma: must be positive");
        need(s.alpha >= 0.0 && s.alpha <= 1.0, path + ".alpha: must lie in [0, 1]");
        need(s.c >= 0.0 && s.c <= 1.0, path + ".c: must lie in [0, 1]");
    }
    auto check_field = [&](const FieldSpec& f, const std::string& path, bool positive) {
        need(kFieldPresets.count(f.preset) > 0, path + ".preset: unknown preset '" + f.preset + "'");
        need(f.b0 >= 0.0 && f.b0 <= 1.0, path + ".b0: requires b0 in [0, 1] (got " + num(f.b0) + ")");
        need(f.a0 >= 0.0, path + ".a0: must be nonnegative");
        need(f.scale >= 0.0, path + ".scale: must be nonnegative");
        need(std::abs(f.profile.amplitude) < 1.0, path + ".profile.amplitude: |amplitude| must be below 1");
        if (f.preset == "constant") {
            need(positive ? f.value > 0.0 : f.value >= 0.0,
                 path + ".value: must be " + (positive ? "positive" : "nonnegative"));
        }
        if (f.preset != "constant") need(c.period == 12.0, path + ": seasonal presets require time.period = 12");
    };
    check_field(c.beta, "model.beta", false);
    check_field(c.eta, "model.eta", true);
    if (c.humans) {
        need(*c.humans > 0.0, "environment.humans: must be positive");
    } else {
        need(c.death > 0.0 && c.death < c.birth, "environment.birth: requires 0 < death < birth");
        check_field(c.carrying_capacity, "environment.carrying_capacity", true);
    }
    if (c.mosquitoes) {
        need(*c.mosquitoes >= 0.0, "environment.mosquitoes: must be nonnegative");
    } else {
        check_field(c.recruitment, "environment.recruitment", false);
    }
    need(c.initial == "figure" || c.initial == "zero", "initial: must be 'figure' or 'zero'");
    for (double x : c.probes) need(x >= 0.0 && x <= c.length, "probes: " + num(x) + " lies outside [0, length]");
    need(c.record_stride > 0, "output.record_stride: must be positive");
    need(c.extinction_threshold > 0.0, "output.extinction_threshold: must be positive");
    need(c.solver.bisection_tol > 0.0, "solver.bisection_tol: must be positive");
    need(c.solver.power_tol > 0.0, "solver.power_tol: must be positive");
    need(c.solver.power_max_iter > 0, "solver.power_max_iter: must be positive");
    need(c.solver.max_doublings > 0, "solver.max_doublings: must be positive");
    need(c.orbit.tolerance > 0.0, "solver.orbit_tolerance: must be positive");
    need(c.orbit.max_periods > 0, "solver.orbit_max_periods: must be positive");
    return out;
}

ScenarioConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError({"line " + std::to_string(e.mark.line + 1) + ", column " +
                           std::to_string(e.mark.column + 1) + ": " + e.msg});
    }
    Reader r;
    if (!root.IsMap()) throw ConfigError({"top level: expected a mapping"});
    r.map(root, "config", {"name", "preset", "grid", "time", "model", "environment", "initial", "probes",
                           "output", "solver", "stages"});

    std::string preset = "baseline";
    r.get(root, "preset", "config", preset);
    ScenarioConfig c;
    try {
        c = preset_config(preset);
    } catch (const ConfigError&) {
        r.fail(root["preset"], "preset: unknown preset '" + preset + "'");
    }
    r.get(root, "name", "config", c.name);

    if (const auto g = root["grid"]; g && r.map(g, "grid", {"nodes", "length"})) {
        r.get_size(g, "nodes", "grid", c.nodes);
        r.get(g, "length", "grid", c.length);
    }
    if (const auto t = root["time"];
        t && r.map(t, "time", {"period", "steps_per_period", "periods", "burn_in_periods"})) {
        r.get(t, "period", "time", c.period);
        r.get_size(t, "steps_per_period", "time", c.steps_per_period);
        r.get_size(t, "periods", "time", c.periods);
        r.get_size(t, "burn_in_periods", "time", c.burn_in_periods);
    }
    if (const auto m = root["model"];
        m && r.map(m, "model", {"diffusion_h", "diffusion_v", "death", "p", "l", "strains", "beta", "eta"})) {
        r.get(m, "diffusion_h", "model", c.diffusion_h);
        r.get(m, "diffusion_v", "model", c.diffusion_v);
        r.get(m, "death", "model", c.death);
        r.get(m, "p", "model", c.p);
        r.get(m, "l", "model", c.l);
        if (const auto s = m["strains"]) {
            if (!s.IsSequence() || s.size() != 2) {
                r.fail(s, "model.strains: expected a list of two strains");
            } else {
                for (std::size_t i = 0; i < 2; ++i) {
                    const std::string path = "model.strains[" + std::to_string(i) + "]";
                    if (!r.map(s[i], path, {"gamma", "alpha", "c"})) continue;
                    r.get(s[i], "gamma", path, c.strains[i].gamma);
                    r.get(s[i], "alpha", path, c.strains[i].alpha);
                    r.get(s[i], "c", path, c.strains[i].c);
                }
            }
        }
        r.field(m, "beta", "model", c.beta);
        r.field(m, "eta", "model", c.eta);
    }
    if (const auto e = root["environment"];
        e && r.map(e, "environment", {"humans", "birth", "carrying_capacity", "mosquitoes", "recruitment"})) {
        r.optional_level(e, "humans", "environment", c.humans);
        r.get(e, "birth", "environment", c.birth);
        r.field(e, "carrying_capacity", "environment", c.carrying_capacity);
        r.optional_level(e, "mosquitoes", "environment", c.mosquitoes);
        r.field(e, "recruitment", "environment", c.recruitment);
    }
    r.get(root, "initial", "config", c.initial);
    if (const auto p = root["probes"]) {
        if (!p.IsSequence()) {
            r.fail(p, "probes: expected a list");
        } else {
            r.get(root, "probes", "config", c.probes);
        }
    }
    if (const auto o = root["output"];
        o && r.map(o, "output", {"directory", "record_stride", "snapshot_every", "extinction_threshold"})) {
        r.get(o, "directory", "output", c.output_dir);
        r.get_size(o, "record_stride", "output", c.record_stride);
        r.get_size(o, "snapshot_every", "output", c.snapshot_every);
        r.get(o, "extinction_threshold", "output", c.extinction_threshold);
    }
    if (const auto s = root["solver"];
        s && r.map(s, "solver", {"bisection_tol", "power_tol", "power_max_iter", "max_doublings",
                                 "orbit_tolerance", "orbit_max_periods"})) {
        r.get(s, "bisection_tol", "solver", c.solver.bisection_tol);
        r.get(s, "power_tol", "solver", c.solver.power_tol);
        r.get(s, "power_max_iter", "solver", c.solver.power_max_iter);
        r.get(s, "max_doublings", "solver", c.solver.max_doublings);
        r.get(s, "orbit_tolerance", "solver", c.orbit.tolerance);
        r.get_size(s, "orbit_max_periods", "solver", c.orbit.max_periods);
    }
    if (const auto s = root["stages"]; s && r.map(s, "stages", {"invasion", "simulate"})) {
        r.get(s, "invasion", "stages", c.invasion);
        r.get(s, "simulate", "stages", c.simulate);
    }

    for (auto& v : validate(c)) r.problems.push_back(std::move(v));
    if (!r.problems.empty()) throw ConfigError(std::move(r.problems));
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "name: " << c.name << "\n";
    os << "preset: " << c.preset << "\n";
    os << "grid: {nodes: " << c.nodes << ", length: " << num(c.length) << "}\n";
    os << "time: {period: " << num(c.period) << ", steps_per_period: " << c.steps_per_period
       << ", periods: " << c.periods << ", burn_in_periods: " << c.burn_in_periods << "}\n";
    os << "model:\n";
    os << "  diffusion_h: " << num(c.diffusion_h) << "\n";
    os << "  diffusion_v: " << num(c.diffusion_v) << "\n";
    os << "  death: " << num(c.death) << "\n";
    os << "  p: " << num(c.p) << "\n";
    os << "  l: " << num(c.l) << "\n";
    os << "  strains:\n";
    for (const auto& s : c.strains) {
        os << "    - {gamma: " << num(s.gamma) << ", alpha: " << num(s.alpha) << ", c: " << num(s.c) << "}\n";
    }
    emit_field(os, "  ", "beta", c.beta);
    emit_field(os, "  ", "eta", c.eta);
    os << "environment:\n";
    os << "  humans: " << (c.humans ? num(*c.humans) : std::string("solve")) << "\n";
    os << "  birth: " << num(c.birth) << "\n";
    emit_field(os, "  ", "carrying_capacity", c.carrying_capacity);
    os << "  mosquitoes: " << (c.mosquitoes ? num(*c.mosquitoes) : std::string("solve")) << "\n";
    emit_field(os, "  ", "recruitment", c.recruitment);
    os << "initial: " << c.initial << "\n";
    os << "probes: [";
    for (std::size_t i = 0; i < c.probes.size(); ++i) os << (i ? ", " : "") << num(c.probes[i]);
    os << "]\n";
    os << "output:\n";
    os << "  directory: " << c.output_dir << "\n";
    os << "  record_stride: " << c.record_stride << "\n";
    os << "  snapshot_every: " << c.snapshot_every << "\n";
    os << "  extinction_threshold: " << num(c.extinction_threshold) << "\n";
    os << "solver:\n";
    os << "  bisection_tol: " << num(c.solver.bisection_tol) << "\n";
    os << "  power_tol: " << num(c.solver.power_tol) << "\n";
    os << "  power_max_iter: " << c.solver.power_max_iter << "\n";
    os << "  max_doublings: " << c.solver.max_doublings << "\n";
    os << "  orbit_tolerance: " << num(c.orbit.tolerance) << "\n";
    os << "  orbit_max_periods: " << c.orbit.max_periods << "\n";
    os << "stages: {invasion: " << (c.invasion ? "true" : "false")
       << ", simulate: " << (c.simulate ? "true" : "false") << "}\n";
    return os.str();
}

void save_config(const ScenarioConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError({"cannot write config file '" + path + "'"});
    out << dump_config(config);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string config_hash(const ScenarioConfig& config) { return sha256_hex(dump_config(config)); }

DemographicParams demography_of(const ScenarioConfig& c) {
    DemographicParams d;
    d.birth = c.birth;
    d.death = c.death;
    d.carrying_capacity = c.carrying_capacity.build(c.period);
    d.diffusion_h = c.diffusion_h;
    d.diffusion_v = c.diffusion_v;
    d.recruitment = c.recruitment.build(c.period);
    d.mosquito_death = c.eta.build(c.period);
    d.period = c.period;
    d.human_override = c.humans;
    d.mosquito_override = c.mosquitoes;
    return d;
}

BuiltScenario build_scenario(const ScenarioConfig& c) {
    if (auto problems = validate(c); !problems.empty()) throw ConfigError(std::move(problems));
    BuiltScenario b;
    b.demography = demography_of(c);
    const SpatialGrid grid(c.length, c.nodes);
    auto& p = b.params;
    p.grid = grid;
    p.steps_per_period = c.steps_per_period;
    p.period = c.period;
    p.diffusion_h = c.diffusion_h;
    p.diffusion_v = c.diffusion_v;
    p.death = c.death;
    p.p = c.p;
    p.l = c.l;
    p.strains = c.strains;
    p.beta = c.beta.build(c.period);
    p.eta = c.eta.build(c.period);
    p.humans = solve_human_steady_state(b.demography, grid);
    PeriodicSolveOptions opts;
    opts.steps_per_period = c.steps_per_period;
    p.mosquitoes = solve_periodic_mosquito(b.demography, grid, opts);
    return b;
}

EpidemicState initial_state(const ScenarioConfig& config, const SpatialGrid& grid) {
    if (config.initial == "zero") return EpidemicState(grid.size(), 0, 0.0);
    return figure_initial_state(grid);
}

}  // namespace twostrain
