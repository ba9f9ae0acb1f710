#pragma once

#include "twostrain/coefficient.hpp"
#include "twostrain/dynamics.hpp"
#include "twostrain/environment.hpp"
#include "twostrain/model.hpp"
#include "twostrain/spectra.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace twostrain {

/// A coefficient named by preset, with optional scale and spatial profile.
///   constant      -> value
///   beta_seasonal -> the five-harmonic seasonal biting rate
///   beta_a0b0     -> a0 (1 - b0 cos wt)
struct FieldSpec {
    std::string preset = "constant";
    double value = 0.0;
    double a0 = 5.1492;
    double b0 = 0.35674;
    double scale = 1.0;
    SpatialProfile profile;

    static FieldSpec named(std::string preset) {
        FieldSpec f;
        f.preset = std::move(preset);
        return f;
    }
    static FieldSpec constant(double value) {
        FieldSpec f;
        f.value = value;
        return f;
    }

    CoefficientField build(double period) const;
    bool operator==(const FieldSpec&) const = default;
};

struct ScenarioConfig {
    std::string name = "baseline";
    std::string preset = "baseline";

    std::size_t nodes = 101;
    double length = 3.14159265358979323846;
    std::size_t steps_per_period = 2400;
    double period = 12.0;
    std::size_t periods = 50;
    std::size_t burn_in_periods = 40;

    double diffusion_h = 0.4;
    double diffusion_v = 0.02;
    double death = 1.0 / 864.0;
    double p = 0.8;
    double l = 0.2;
    std::array<StrainParams, 2> strains{};
    FieldSpec beta = FieldSpec::named("beta_seasonal");
    FieldSpec eta = FieldSpec::constant(0.8);

    // Humans: a fixed N, or the logistic steady state from birth and K.
    std::optional<double> humans = 110.0;
    double birth = 0.0;
    FieldSpec carrying_capacity = FieldSpec::constant(110.0);
    // Mosquitoes: a fixed M*, or the periodic solution driven by Lambda.
    std::optional<double> mosquitoes = 220.0;
    FieldSpec recruitment = FieldSpec::constant(176.0);

    std::string initial = "figure";  // figure | zero
    std::vector<double> probes{0.7448};
    std::string output_dir = "out";
    std::size_t record_stride = 20;       // steps between trajectory rows
    std::size_t snapshot_every = 10;      // periods between full-field snapshots
    double extinction_threshold = 1e-6;

    SolverSettings solver;
    OrbitOptions orbit;
    bool invasion = true;
    bool simulate = true;

    bool operator==(const ScenarioConfig&) const;
};

/// Code-owned presets: baseline, case1, case2, case3.
ScenarioConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Parses YAML text. Throws ConfigError listing every problem, with line numbers.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// All violated constraints; empty when valid.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Canonical YAML: fixed key order, round-trip exact numbers.
std::string dump_config(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::string& path);

/// SHA-256 of the canonical form, lowercase hex.
std::string config_hash(const ScenarioConfig& config);
std::string sha256_hex(const std::string& bytes);

struct BuiltScenario {
    ModelParams params;
    DemographicParams demography;
};

/// Solves the demographic steady state (or applies pinned N, M*) and assembles ModelParams.
BuiltScenario build_scenario(const ScenarioConfig& config);
DemographicParams demography_of(const ScenarioConfig& config);

EpidemicState initial_state(const ScenarioConfig& config, const SpatialGrid& grid);

}  // namespace twostrain
