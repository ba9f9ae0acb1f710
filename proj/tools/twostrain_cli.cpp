// Command-line front end: rnum, invade, simulate, sweep, limits, preset.
#include "twostrain/config.hpp"
#include "twostrain/error.hpp"
#include "twostrain/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace twostrain;

namespace {

// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double a = 0, b = 0, h = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> a >> c1 >> b >> c2 >> h) || c1 != ':' || c2 != ':' || !(h > 0.0) || b < a) {
            throw InvalidArgument("bad range '" + text + "', expected start:stop:step");
        }
        const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * h);
        return out;
    }
    std::istringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw InvalidArgument("bad value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw InvalidArgument("empty value list");
    return out;
}

void print_file(const RunManifest& m, const std::string& name) {
    std::ifstream in(m.directory + "/" + name);
    if (in) std::cout << in.rdbuf();
}

int report(const RunManifest& m) {
    for (const auto& s : m.stages) {
        std::cout << (s.ok ? "[ok]   " : "[fail] ") << s.name;
        if (!s.message.empty()) std::cout << ": " << s.message;
        std::cout << "  (" << s.seconds << " s)\n";
    }
    for (const auto& o : m.outputs) {
        if (o.path == "numbers.csv" || o.path == "limit_numbers.csv" || o.path == "sweep.csv") print_file(m, o.path);
    }
    if (m.classification) std::cout << "classification: " << *m.classification << "\n";
    std::cout << "manifest: " << m.directory << "/manifest.json\n";
    return m.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-strain vector-borne reaction-diffusion model: reproduction numbers, simulation, sweeps"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "Scenario file (YAML) or preset:<name>")->required();
        sub->add_option("--out", out_dir, "Override output.directory");
    };

    auto* rnum = app.add_subcommand("rnum", "Basic reproduction numbers R1, R2, R0");
    add_common(rnum);
    auto* invade = app.add_subcommand("invade", "Basic and invasion reproduction numbers");
    add_common(invade);
    auto* sim = app.add_subcommand("simulate", "Full scenario: numbers, simulation, classification");
    add_common(sim);

    auto* sweep = app.add_subcommand("sweep", "R0 along one parameter axis");
    add_common(sweep);
    std::string axis;
    std::string values;
    sweep->add_option("--axis", axis, "a0 | b0 | q | D")->required();
    sweep->add_option("--values", values, "Comma list or start:stop:step")->required();
    sweep->add_option("--workers", workers, "Worker threads");

    auto* limits = app.add_subcommand("limits", "Small- and large-diffusion limits along a D ladder");
    add_common(limits);
    std::string ladder = "1e-4,1e-3,1e-2,1e-1,1,10,100,1000";
    limits->add_option("--ladder", ladder, "Multiples of the baseline (D_h, D_v)");
    limits->add_option("--workers", workers, "Worker threads");

    auto* preset = app.add_subcommand("preset", "Print a preset as a canonical config file");
    std::string preset_name;
    preset->add_option("name", preset_name, "baseline | case1 | case2 | case3")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*preset) {
            std::cout << dump_config(preset_config(preset_name));
            return 0;
        }
        ScenarioConfig config = config_path.rfind("preset:", 0) == 0 ? preset_config(config_path.substr(7))
                                                                      : load_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;

        if (*rnum) return report(run_scenario(config, {false, false}, "rnum"));
        if (*invade) return report(run_scenario(config, {true, false}, "invade"));
        if (*sim) return report(run_scenario(config, {config.invasion, true}, "simulate"));
        if (*sweep) return report(run_sweep(config, parse_axis(axis), parse_values(values), workers));
        if (*limits) return report(run_limits(config, parse_values(ladder), workers));
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
