#pragma once

#include "twostrain/dynamics.hpp"
#include "twostrain/environment.hpp"
#include "twostrain/periodic_linear.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace twostrain {

struct SolverSettings {
    double bisection_tol = 1e-4;  // relative bracket width on R
    double power_tol = 1e-8;      // relative change of the radius estimate
    int power_max_iter = 20000;
    int max_doublings = 60;
};

/// Linearized periodic problem dv/dt = (-V + F/lambda) v, with the decay part V
/// and coupling part F held by a tabulated PeriodicPropagator.
class NextGenProblem {
public:
    NextGenProblem(const LinearPeriodicSystem& system, std::size_t steps_per_period);

    const PeriodicPropagator& propagator() const noexcept { return *propagator_; }
    std::size_t nodes() const noexcept { return propagator_->nodes(); }
    std::size_t steps_per_period() const noexcept { return propagator_->steps_per_period(); }
    bool has_transmission() const noexcept { return propagator_->has_coupling(); }

private:
    std::shared_ptr<const PeriodicPropagator> propagator_;
};

/// Spectral radius of the one-period map at scale 1/lambda.
/// Small problems (dofs <= kDenseDofLimit) use the dense eigen-solve.
double monodromy_radius(const NextGenProblem& prob, double lambda, const SolverSettings& settings = {});

struct SpectralResult {
    double value = 0.0;
    double bracket_width = 0.0;    // relative width of the final bracket
    double radius_at_value = 0.0;  // monodromy radius at lambda = value
    double radius_at_one = 0.0;    // r(P) with unscaled transmission
    int evaluations = 0;           // monodromy radius evaluations
    std::size_t nodes = 0;
    std::size_t steps = 0;
};

/// R = the lambda at which the monodromy radius equals 1; R = 0 without transmission.
SpectralResult reproduction_number(const NextGenProblem& prob, const SolverSettings& settings = {});

/// Linearization of the single-strain subsystem at the disease-free state.
LinearPeriodicSystem basic_system(const TwoStrainModel& model, Strain s);

/// Linearization of strain-`invader` equations at the resident orbit
/// (width 2n: I_j* then I_vj*).
LinearPeriodicSystem invasion_system(const TwoStrainModel& model, Strain invader,
                                     const PeriodicOrbit& resident);

struct BasicNumbers {
    std::array<SpectralResult, 2> strain;
    double r0 = 0.0;
};

BasicNumbers basic_numbers(const TwoStrainModel& model, const SolverSettings& settings = {});

struct InvasionNumber {
    SpectralResult result;
    bool resident_trivial = false;  // resident orbit is zero, so the basic problem was solved
    std::size_t resident_periods = 0;
};

/// R-hat for both strains. The resident orbit is zero when its basic number is <= 1.
std::array<InvasionNumber, 2> invasion_numbers(const TwoStrainModel& model, const BasicNumbers& basic,
                                               const SolverSettings& settings = {},
                                               const OrbitOptions& orbit = {});

/// R_i(x, 0) at every node, from diffusion-free problems driven by M0(t, x).
std::vector<SpectralResult> local_r0_profile(const TwoStrainModel& model, Strain s,
                                             const PeriodicOrbit& small_diffusion_mosquitoes,
                                             const SolverSettings& settings = {});

/// R~_i(inf): the spatially averaged diffusion-free problem driven by M~inf(t).
SpectralResult averaged_r0_infinity(const TwoStrainModel& model, Strain s,
                                    const PeriodicOrbit& large_diffusion_mosquitoes,
                                    const SolverSettings& settings = {});

struct VectorBiasRow {
    double q = 0.0;
    std::array<double, 2> r{};
    double r0 = 0.0;
    double r0_sqrt_q = 0.0;  // R0(q) * sqrt(q)
};

/// R0 at each q = l/p, holding p fixed and setting l = q p.
std::vector<VectorBiasRow> vector_bias_scaling(const ModelParams& params, const std::vector<double>& q,
                                               const SolverSettings& settings = {});

}  // namespace twostrain
