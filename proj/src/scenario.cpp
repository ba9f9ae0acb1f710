#include "twostrain/scenario.hpp"

#include "twostrain/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef TWOSTRAIN_VERSION
#define TWOSTRAIN_VERSION "0.0.0"
#endif

namespace twostrain {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path run_directory(const ScenarioConfig& config, const std::string& suffix = {}) {
    fs::path dir(config.output_dir);
    if (dir.is_relative()) dir = fs::path(output_root()) / dir;
    if (!suffix.empty()) dir /= suffix;
    fs::create_directories(dir);
    return dir;
}

OutputFile write_output(const fs::path& dir, const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    out.close();
    if (!out) throw std::runtime_error("write failed for " + path.string());
    return OutputFile{name, sha256_hex(body), body.size()};
}

RunManifest start_manifest(const ScenarioConfig& config, const std::string& command, const fs::path& dir) {
    RunManifest m;
    m.command = command;
    m.scenario = config.name;
    m.config_hash = config_hash(config);
    m.version = TWOSTRAIN_VERSION;
    m.nodes = config.nodes;
    m.steps_per_period = config.steps_per_period;
    m.directory = dir.string();
    return m;
}

void finish_manifest(RunManifest& m, const fs::path& dir, Clock::time_point t0) {
    m.wall_seconds = seconds_since(t0);
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << m.to_json();
}

// Runs `body` as a named stage; returns false (and records why) on any exception.
template <class F>
bool stage(RunManifest& m, const std::string& name, F&& body) {
    const auto t0 = Clock::now();
    StageRecord rec{name, false, "", 0.0};
    try {
        body(rec);
        rec.ok = rec.message.empty();
    } catch (const ConfigError& e) {
        rec.message = e.what();
    } catch (const std::exception& e) {
        rec.message = e.what();
    }
    rec.seconds = seconds_since(t0);
    m.stages.push_back(rec);
    return rec.ok;
}

void skip(RunManifest& m, const std::string& name) {
    m.stages.push_back(StageRecord{name, false, "skipped after an earlier failure", 0.0});
}

struct NumbersCsv {
    std::ostringstream body;
    const ScenarioConfig& config;

    explicit NumbersCsv(const ScenarioConfig& c) : config(c) {
        body << "scenario,strain,quantity,value,bracket_width,n,steps_per_period\n";
    }
    void row(const std::string& strain, const std::string& quantity, const SpectralResult& r) {
        body << config.name << ',' << strain << ',' << quantity << ',' << csv_number(r.value) << ','
             << csv_number(r.bracket_width) << ',' << config.nodes << ',' << config.steps_per_period << '\n';
    }
    void row(const std::string& strain, const std::string& quantity, double value, double width) {
        SpectralResult r;
        r.value = value;
        r.bracket_width = width;
        row(strain, quantity, r);
    }
};

const char* kComponentNames[kComponents] = {"I1", "Iv1", "I2", "Iv2"};

}  // namespace

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string output_root() {
    const char* env = std::getenv("TWOSTRAIN_OUTPUT_ROOT");
    return env && *env ? std::string(env) : fs::current_path().string();
}

bool RunManifest::ok() const {
    return !stages.empty() && std::all_of(stages.begin(), stages.end(), [](const StageRecord& s) { return s.ok; });
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["scenario"] = scenario;
    j["config_hash"] = config_hash;
    j["solver_version"] = version;
    j["resolution"] = {{"nodes", nodes}, {"steps_per_period", steps_per_period}};
    j["wall_seconds"] = wall_seconds;
    j["ok"] = ok();
    if (classification) j["classification"] = *classification;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
        j["stages"].push_back({{"name", s.name}, {"ok", s.ok}, {"message", s.message}, {"seconds", s.seconds}});
    }
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    return j.dump(2) + "\n";
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& f) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

RunManifest run_scenario(const ScenarioConfig& config, const ScenarioStages& stages, const std::string& command) {
    const auto t0 = Clock::now();
    const auto dir = run_directory(config);
    auto m = start_manifest(config, command, dir);

    std::optional<TwoStrainModel> model;
    std::optional<BasicNumbers> basic;
    NumbersCsv numbers(config);
    bool alive = stage(m, "environment", [&](StageRecord&) { model.emplace(build_scenario(config).params); });

    if (alive) {
        alive = stage(m, "basic_numbers", [&](StageRecord&) {
            basic = basic_numbers(*model, config.solver);
            numbers.row("1", "R1", basic->strain[0]);
            numbers.row("2", "R2", basic->strain[1]);
            numbers.row("max", "R0", basic->r0,
                        std::max(basic->strain[0].bracket_width, basic->strain[1].bracket_width));
        });
    } else {
        skip(m, "basic_numbers");
    }

    if (stages.invasion) {
        if (alive) {
            alive = stage(m, "invasion_numbers", [&](StageRecord&) {
                const auto inv = invasion_numbers(*model, *basic, config.solver, config.orbit);
                numbers.row("1", "Rhat1", inv[0].result);
                numbers.row("2", "Rhat2", inv[1].result);
            });
        } else {
            skip(m, "invasion_numbers");
        }
    }
    if (basic) m.outputs.push_back(write_output(dir, "numbers.csv", numbers.body.str()));

    if (stages.simulate) {
        if (alive) {
            alive = stage(m, "simulate", [&](StageRecord& rec) {
                const auto& grid = model->grid();
                const std::size_t steps = model->steps_per_period();
                std::ostringstream traj;
                traj << "t,x";
                for (const char* c : kComponentNames) traj << ',' << c;
                traj << '\n';
                std::ostringstream snap;
                snap << "period,t,x";
                for (const char* c : kComponentNames) snap << ',' << c;
                snap << '\n';
                const auto stride = static_cast<std::int64_t>(config.record_stride);
                const auto snapshot_steps = static_cast<std::int64_t>(config.snapshot_every * steps);
                auto recorder = [&](const EpidemicState& s) {
                    if (s.step() % stride == 0) {
                        for (double x : config.probes) {
                            traj << csv_number(s.time()) << ',' << csv_number(x);
                            for (std::size_t c = 0; c < kComponents; ++c) {
                                traj << ',' << csv_number(grid.interpolate(s.field(c), x));
                            }
                            traj << '\n';
                        }
                    }
                    if (snapshot_steps > 0 && s.step() % snapshot_steps == 0) {
                        const auto period = s.step() / static_cast<std::int64_t>(steps);
                        for (std::size_t k = 0; k < grid.size(); ++k) {
                            snap << period << ',' << csv_number(s.time()) << ',' << csv_number(grid.node(k));
                            for (std::size_t c = 0; c < kComponents; ++c) snap << ',' << csv_number(s.field(c)[k]);
                            snap << '\n';
                        }
                    }
                };
                SimulationOptions opts;
                opts.t_end = config.period * static_cast<double>(config.periods);
                opts.burn_in = config.period * static_cast<double>(config.burn_in_periods);
                opts.record_stride = 1;
                const auto summary = simulate(*model, initial_state(config, grid), opts, recorder);
                m.outputs.push_back(write_output(dir, "trajectory.csv", traj.str()));
                m.outputs.push_back(write_output(dir, "snapshots.csv", snap.str()));

                const auto& q = summary.persistence;
                const auto regime = classify(q, config.extinction_threshold);
                m.classification = to_string(regime);
                std::ostringstream per;
                per << "scenario,component,floor,ceiling,burn_in,samples\n";
                for (std::size_t c = 0; c < kComponents; ++c) {
                    per << config.name << ',' << kComponentNames[c] << ',' << csv_number(q.floor[c]) << ','
                        << csv_number(q.ceiling[c]) << ',' << csv_number(opts.burn_in) << ',' << q.samples << '\n';
                }
                m.outputs.push_back(write_output(dir, "persistence.csv", per.str()));

                std::ostringstream sum;
                sum << "key,value\n"
                    << "classification," << *m.classification << '\n'
                    << "max_raw_violation," << csv_number(summary.max_raw_violation) << '\n'
                    << "max_residual," << csv_number(summary.max_residual) << '\n'
                    << "positivity_ok," << (summary.positivity_ok ? 1 : 0) << '\n'
                    << "steps," << summary.steps << '\n';
                m.outputs.push_back(write_output(dir, "summary.csv", sum.str()));

                if (summary.max_residual > 1e-10) {
                    rec.message = "X(t) residual " + csv_number(summary.max_residual) + " exceeds 1e-10";
                } else if (!summary.positivity_ok) {
                    rec.message = "positivity monitor failed";
                }
            });
        } else {
            skip(m, "simulate");
        }
    }
    finish_manifest(m, dir, t0);
    return m;
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "a0") return SweepAxis::A0;
    if (name == "b0") return SweepAxis::B0;
    if (name == "q") return SweepAxis::Q;
    if (name == "D" || name == "d" || name == "dh,dv" || name == "ladder") return SweepAxis::DiffusionLadder;
    throw InvalidArgument("unknown sweep axis '" + name + "' (expected a0, b0, q or D)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::A0: return "a0";
        case SweepAxis::B0: return "b0";
        case SweepAxis::Q: return "q";
        case SweepAxis::DiffusionLadder: return "D";
    }
    return "?";
}

namespace {

ScenarioConfig sweep_point(const ScenarioConfig& base, SweepAxis axis, double v) {
    ScenarioConfig c = base;
    switch (axis) {
        case SweepAxis::A0:
            c.beta.preset = "beta_a0b0";
            c.beta.a0 = v;
            break;
        case SweepAxis::B0:
            c.beta.preset = "beta_a0b0";
            c.beta.b0 = v;
            break;
        case SweepAxis::Q:
            c.l = v * c.p;
            break;
        case SweepAxis::DiffusionLadder:
            c.diffusion_h *= v;
            c.diffusion_v *= v;
            break;
    }
    return c;
}

struct PointResult {
    bool ok = false;
    std::string error;
    BasicNumbers numbers;
};

std::vector<PointResult> solve_points(const std::vector<ScenarioConfig>& points, std::size_t workers,
                                      const SolverSettings& settings) {
    std::vector<PointResult> out(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) {
        try {
            const TwoStrainModel model(build_scenario(points[i]).params);
            out[i].numbers = basic_numbers(model, settings);
            out[i].ok = true;
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

RunManifest run_sweep(const ScenarioConfig& config, SweepAxis axis, const std::vector<double>& values,
                      std::size_t workers) {
    const auto t0 = Clock::now();
    const auto dir = run_directory(config, "sweep_" + to_string(axis));
    auto m = start_manifest(config, "sweep --axis " + to_string(axis), dir);

    stage(m, "sweep", [&](StageRecord& rec) {
        if (values.empty()) throw InvalidArgument("sweep needs at least one value");
        std::vector<ScenarioConfig> points;
        for (double v : values) points.push_back(sweep_point(config, axis, v));
        if (axis == SweepAxis::B0) points.push_back(sweep_point(config, axis, 0.0));  // time-averaged comparator
        for (const auto& p : points) {
            if (auto problems = validate(p); !problems.empty()) throw ConfigError(std::move(problems));
        }
        const auto results = solve_points(points, workers, config.solver);

        std::ostringstream csv;
        csv << "scenario,axis,value,R1,R2,R0";
        if (axis == SweepAxis::B0) csv << ",R0_averaged_beta";
        if (axis == SweepAxis::Q) csv << ",R0_sqrt_q";
        csv << ",bracket_width,n,steps_per_period,status\n";
        std::size_t failures = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto& r = results[i];
            const auto& b = r.numbers;
            csv << config.name << ',' << to_string(axis) << ',' << csv_number(values[i]) << ',';
            if (r.ok) {
                csv << csv_number(b.strain[0].value) << ',' << csv_number(b.strain[1].value) << ','
                    << csv_number(b.r0);
            } else {
                csv << "nan,nan,nan";
                ++failures;
            }
            if (axis == SweepAxis::B0) {
                const auto& ref = results.back();
                csv << ',' << (ref.ok ? csv_number(ref.numbers.r0) : std::string("nan"));
            }
            if (axis == SweepAxis::Q) csv << ',' << (r.ok ? csv_number(b.r0 * std::sqrt(values[i])) : "nan");
            const double width = r.ok ? std::max(b.strain[0].bracket_width, b.strain[1].bracket_width) : 0.0;
            csv << ',' << csv_number(width) << ',' << config.nodes << ',' << config.steps_per_period << ','
                << (r.ok ? std::string("ok") : "error: " + sanitize(r.error)) << '\n';
        }
        if (axis == SweepAxis::B0 && !results.back().ok) ++failures;
        m.outputs.push_back(write_output(dir, "sweep.csv", csv.str()));
        if (failures) rec.message = std::to_string(failures) + " sweep point(s) failed";
    });
    finish_manifest(m, dir, t0);
    return m;
}

RunManifest run_limits(const ScenarioConfig& config, const std::vector<double>& ladder, std::size_t workers) {
    const auto t0 = Clock::now();
    const auto dir = run_directory(config, "limits");
    auto m = start_manifest(config, "limits", dir);

    std::array<double, 2> small{}, large{};
    NumbersCsv numbers(config);
    const bool alive = stage(m, "limit_quantities", [&](StageRecord&) {
        const auto built = build_scenario(config);
        const TwoStrainModel model(built.params);
        PeriodicSolveOptions opts;
        opts.steps_per_period = config.steps_per_period;
        const auto limits = limit_fields(built.demography, model.grid(), opts);
        std::ostringstream profile;
        profile << "x,R1_x0,R2_x0\n";
        std::array<std::vector<SpectralResult>, 2> local;
        parallel_for(2, workers, [&](std::size_t i) {
            local[i] = local_r0_profile(model, static_cast<Strain>(i), limits.small_diffusion, config.solver);
        });
        for (std::size_t k = 0; k < model.nodes(); ++k) {
            profile << csv_number(model.grid().node(k)) << ',' << csv_number(local[0][k].value) << ','
                    << csv_number(local[1][k].value) << '\n';
        }
        m.outputs.push_back(write_output(dir, "local_profile.csv", profile.str()));
        for (std::size_t i = 0; i < 2; ++i) {
            const auto best = std::max_element(local[i].begin(), local[i].end(),
                                               [](const auto& a, const auto& b) { return a.value < b.value; });
            small[i] = best->value;
            const auto inf = averaged_r0_infinity(model, static_cast<Strain>(i), limits.large_diffusion, config.solver);
            large[i] = inf.value;
            const std::string s = std::to_string(i + 1);
            numbers.row(s, "Rx0max", *best);
            numbers.row(s, "Rinf", inf);
        }
    });
    if (alive) m.outputs.push_back(write_output(dir, "limit_numbers.csv", numbers.body.str()));

    if (alive) {
        stage(m, "ladder", [&](StageRecord& rec) {
            std::vector<ScenarioConfig> points;
            for (double v : ladder) points.push_back(sweep_point(config, SweepAxis::DiffusionLadder, v));
            const auto results = solve_points(points, workers, config.solver);
            std::ostringstream csv;
            csv << "scenario,strain,scale,D_h,D_v,R,Rx0max,Rinf,gap_small,gap_large,status\n";
            std::size_t failures = 0;
            for (std::size_t i = 0; i < 2; ++i) {
                for (std::size_t k = 0; k < ladder.size(); ++k) {
                    const auto& r = results[k];
                    const double R = r.ok ? r.numbers.strain[i].value : std::nan("");
                    csv << config.name << ',' << i + 1 << ',' << csv_number(ladder[k]) << ','
                        << csv_number(points[k].diffusion_h) << ',' << csv_number(points[k].diffusion_v) << ','
                        << csv_number(R) << ',' << csv_number(small[i]) << ',' << csv_number(large[i]) << ','
                        << csv_number(std::abs(R - small[i]) / small[i]) << ','
                        << csv_number(std::abs(R - large[i]) / large[i]) << ','
                        << (r.ok ? std::string("ok") : "error: " + sanitize(r.error)) << '\n';
                    if (!r.ok && i == 0) ++failures;
                }
            }
            m.outputs.push_back(write_output(dir, "ladder.csv", csv.str()));
            if (failures) rec.message = std::to_string(failures) + " ladder point(s) failed";
        });
    } else {
        skip(m, "ladder");
    }
    finish_manifest(m, dir, t0);
    return m;
}

}  // namespace twostrain
