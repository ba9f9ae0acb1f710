#pragma once

#include "twostrain/coefficient.hpp"
#include "twostrain/grid.hpp"
#include "twostrain/periodic_orbit.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace twostrain {

/// Host and vector demography.
///
/// Humans follow N_t = D_h Lap N + b(1 - N/K)^+ N - d N; adult female mosquitoes
/// follow M_t = D_v Lap M + Lambda(t,x) - eta(t,x) M. Either steady object can be
/// pinned to a constant instead of solved for.
struct DemographicParams {
    double birth = 0.0;                       // b, month^-1
    double death = 1.0 / (72.0 * 12.0);       // d, month^-1
    CoefficientField carrying_capacity = CoefficientField::constant(110.0);
    double diffusion_h = 0.4;                 // km^2 month^-1
    double diffusion_v = 0.02;
    CoefficientField recruitment = CoefficientField::constant(176.0);  // Lambda
    CoefficientField mosquito_death = CoefficientField::constant(0.8); // eta
    double period = 12.0;
    std::optional<double> human_override;     // N(x) == value
    std::optional<double> mosquito_override;  // M*(t,x) == value
};

struct SteadyStateOptions {
    double tolerance = 1e-10;         // sup-norm of dN/dt
    std::size_t max_steps = 2'000'000;
};

/// Positive steady state N(x) by pseudo-time marching from K/2.
std::vector<double> solve_human_steady_state(const DemographicParams& p, const SpatialGrid& grid,
                                             const SteadyStateOptions& options = {});

struct PeriodicSolveOptions {
    std::size_t steps_per_period = 2400;
    double tolerance = 1e-9;          // relative sup-norm change between period snapshots
    std::size_t max_periods = 5000;
};

/// Periodic attractor M*(t,x) of the mosquito equation, started from M == 0.
/// Sampled at `steps_per_period` points per period; width = grid.size().
PeriodicOrbit solve_periodic_mosquito(const DemographicParams& p, const SpatialGrid& grid,
                                      const PeriodicSolveOptions& options = {});

struct LimitFields {
    PeriodicOrbit small_diffusion;   // M0(t,x): per-node ODE, width = grid.size()
    PeriodicOrbit large_diffusion;   // M~inf(t): spatially averaged closed form, width 1
};

/// Limiting mosquito profiles as D_v -> 0 and D_v -> infinity.
LimitFields limit_fields(const DemographicParams& p, const SpatialGrid& grid,
                         const PeriodicSolveOptions& options = {});

/// Closed-form periodic solution of M' = lambda(t) - eta(t) M, evaluated by
/// composite Simpson quadrature on `samples` x 4 subintervals per period.
PeriodicOrbit averaged_periodic_solution(const CoefficientSampler& recruitment,
                                         const CoefficientSampler& death, double period,
                                         std::size_t samples);

}  // namespace twostrain
