#pragma once

#include "twostrain/imex.hpp"
#include "twostrain/model.hpp"
#include "twostrain/periodic_orbit.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace twostrain {

/// Per-node infection forces.
///   J1, J3: new human infections per infectious mosquito (strains 1, 2)
///   J2, J4: force of infection on mosquitoes from infectious humans
struct InfectionForces {
    std::vector<double> j1;
    std::vector<double> j2;
    std::vector<double> j3;
    std::vector<double> j4;
};

/// Evaluates the forces at the state's own time. Rejects states outside X(t).
InfectionForces infection_forces(const ModelParams& params, const EpidemicState& state);

/// Relative size of the box violation before clamping, and after.
struct StepDiagnostics {
    double raw_violation = 0.0;
    double residual = 0.0;
};

/// Time-discrete two-strain system on a fixed grid and step size.
///
/// Coefficients (beta, eta, M*) are tabulated on the step grid once. After every
/// step the state is projected back into X(t) when the excursion is below
/// `clamp_tolerance` times the local scale (N or M*); larger excursions throw.
class TwoStrainModel {
public:
    struct Workspace {
        ImexStepper::Workspace full;
        ImexStepper::Workspace single;
    };

    explicit TwoStrainModel(ModelParams params, double clamp_tolerance = 1e-8);

    const ModelParams& params() const noexcept { return params_; }
    const SpatialGrid& grid() const noexcept { return params_.grid; }
    std::size_t nodes() const noexcept { return params_.grid.size(); }
    std::size_t steps_per_period() const noexcept { return params_.steps_per_period; }
    double dt() const noexcept { return params_.dt(); }
    double time_of(std::int64_t step) const noexcept { return static_cast<double>(step) * dt(); }

    Workspace make_workspace() const;

    /// Advances a full state by one step in place.
    StepDiagnostics step(EpidemicState& state, Workspace& ws) const;
    EpidemicState step_full(const EpidemicState& state) const;

    /// Advances the single-strain subsystem for `s` (layout: I_i then I_vi) from
    /// step j to j+1, clamping into 0 <= I <= N, 0 <= I_v <= M*.
    StepDiagnostics step_single(Strain s, std::span<double> pair, std::int64_t j, Workspace& ws) const;

    /// max over nodes of the relative distance of `state` from X(t).
    double box_residual(const EpidemicState& state) const;

    std::span<const double> beta_at(std::int64_t j) const { return row(beta_, j); }
    std::span<const double> eta_at(std::int64_t j) const { return row(eta_, j); }
    std::span<const double> mosquitoes_at(std::int64_t j) const { return row(mstar_, j); }

private:
    std::span<const double> row(const std::vector<double>& table, std::int64_t j) const;
    StepDiagnostics project(std::span<double> values, std::int64_t j, std::size_t strains) const;

    ModelParams params_;
    double clamp_tolerance_;
    std::vector<double> beta_;
    std::vector<double> eta_;
    std::vector<double> mstar_;
    ImexStepper full_stepper_;
    ImexStepper single_stepper_;
};

/// The initial data of the long-run figures:
/// I1 = 6(1+cos 2x), Iv1 = 10(1+cos 2x), I2 = 5(1+cos 2x), Iv2 = 8(1+cos 2x).
EpidemicState figure_initial_state(const SpatialGrid& grid);

/// Post-burn-in floor (inf_t min_x) and ceiling (sup_t max_x) per component.
struct PersistenceMetrics {
    std::array<double, kComponents> floor{};
    std::array<double, kComponents> ceiling{};
    std::size_t samples = 0;
};

/// Accumulates PersistenceMetrics over states with time >= burn_in.
class PersistenceMonitor {
public:
    explicit PersistenceMonitor(double burn_in);
    void observe(const EpidemicState& state);
    PersistenceMetrics metrics() const;

private:
    double burn_in_;
    PersistenceMetrics acc_;
};

PersistenceMetrics persistence_metrics(std::span<const EpidemicState> trajectory, double burn_in);

using Recorder = std::function<void(const EpidemicState&)>;

struct SimulationOptions {
    double t_end = 600.0;
    double burn_in = 480.0;
    std::size_t record_stride = 0;  // steps between recorder calls; 0 disables
};

struct TrajectorySummary {
    EpidemicState final_state;
    PersistenceMetrics persistence;
    double max_raw_violation = 0.0;  // worst pre-clamp X(t) excursion, relative
    double max_residual = 0.0;       // worst post-step X(t) residual, relative
    bool positivity_ok = true;       // components once nonzero stayed strictly positive
    std::int64_t steps = 0;
};

/// Advances `initial` to t_end. The recorder sees the initial state and every
/// `record_stride`-th state after it.
TrajectorySummary simulate(const TwoStrainModel& model, EpidemicState initial,
                           const SimulationOptions& options, const Recorder& recorder = {});

enum class Regime { DiseaseFree, Coexistence, SensitiveOnly, ResistantOnly };
std::string to_string(Regime r);

/// A strain counts as extinct when both of its ceilings fall below `threshold`.
Regime classify(const PersistenceMetrics& m, double threshold);

struct OrbitOptions {
    double tolerance = 1e-8;        // relative sup-norm change between period snapshots
    std::size_t max_periods = 200;
    double initial_fraction = 1e-2; // start from (f N, f M*)
    double zero_threshold = 1e-12;  // relative size below which the orbit counts as zero
};

struct SingleStrainOrbit {
    PeriodicOrbit orbit;   // width 2n: I_i* then I_vi*
    bool trivial = false;  // converged to the zero orbit
    std::size_t periods = 0;
};

/// Boundary periodic orbit E_i of the single-strain subsystem. When
/// `expect_positive` is set, convergence to zero throws InvariantViolation.
SingleStrainOrbit single_strain_periodic_orbit(const TwoStrainModel& model, Strain s,
                                               const OrbitOptions& options = {},
                                               bool expect_positive = false);

}  // namespace twostrain
