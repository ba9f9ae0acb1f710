#pragma once

#include "twostrain/config.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twostrain {

struct OutputFile {
    std::string path;    // relative to the run directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct StageRecord {
    std::string name;
    bool ok = false;
    std::string message;
    double seconds = 0.0;
};

/// What a run did and wrote. Written to manifest.json next to the outputs.
struct RunManifest {
    std::string command;
    std::string scenario;
    std::string config_hash;
    std::string version;
    std::size_t nodes = 0;
    std::size_t steps_per_period = 0;
    double wall_seconds = 0.0;
    std::string directory;
    std::vector<StageRecord> stages;
    std::vector<OutputFile> outputs;
    std::optional<std::string> classification;

    bool ok() const;
    std::string to_json() const;
};

/// Root directory for outputs: $TWOSTRAIN_OUTPUT_ROOT when set, else the cwd.
std::string output_root();

struct ScenarioStages {
    bool invasion = true;
    bool simulate = true;
};

/// environment -> basic numbers -> invasion numbers -> simulation -> classification.
/// After a failed stage the remaining stages are recorded as skipped.
RunManifest run_scenario(const ScenarioConfig& config, const ScenarioStages& stages, const std::string& command);

enum class SweepAxis { A0, B0, Q, DiffusionLadder };
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

/// One basic-number solve per value on a bounded worker pool; rows keep input order.
/// Axis DiffusionLadder scales both D_h and D_v by each value.
RunManifest run_sweep(const ScenarioConfig& config, SweepAxis axis, const std::vector<double>& values,
                      std::size_t workers);

/// Diffusion-limit study: R_i(D) along `ladder` (multiples of the baseline D)
/// against max_x R_i(x, 0) and R~_i(inf).
RunManifest run_limits(const ScenarioConfig& config, const std::vector<double>& ladder, std::size_t workers);

/// Runs f(i) for i in [0, count) on up to `workers` threads; exceptions are caught per item.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& f);

/// "%.9g" formatting used by every CSV.
std::string csv_number(double v);

}  // namespace twostrain
