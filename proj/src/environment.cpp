#include "twostrain/environment.hpp"

#include "twostrain/error.hpp"
#include "twostrain/imex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twostrain {

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Tabulates a field on the step grid: row j holds nodal values at t_j.
std::vector<double> tabulate(const CoefficientField& f, const SpatialGrid& grid, std::size_t steps,
                             double period) {
    const std::size_t n = grid.size();
    const auto sampler = f.sampler(grid);
    std::vector<double> table(steps * n);
    for (std::size_t j = 0; j < steps; ++j) {
        sampler(period * static_cast<double>(j) / static_cast<double>(steps),
                std::span<double>(table.data() + j * n, n));
    }
    return table;
}

// Periodic solution of M_t = D Lap M + Lambda - eta M on the step grid.
PeriodicOrbit periodic_linear_source(const ImexStepper& stepper, const std::vector<double>& source,
                                     const std::vector<double>& decay, double period,
                                     const PeriodicSolveOptions& options) {
    const std::size_t n = stepper.nodes();
    const std::size_t steps = options.steps_per_period;
    auto reaction = [&](std::int64_t index, std::span<const double> m, std::span<double> rate) {
        const std::size_t row = static_cast<std::size_t>(index) % steps * n;
        for (std::size_t k = 0; k < n; ++k) rate[k] = source[row + k] - decay[row + k] * m[k];
    };
    auto ws = stepper.make_workspace();
    std::vector<double> state(n, 0.0);
    std::vector<double> previous(n);
    bool converged = false;
    for (std::size_t period_index = 0; period_index < options.max_periods; ++period_index) {
        previous = state;
        for (std::size_t j = 0; j < steps; ++j) {
            stepper.step(static_cast<std::int64_t>(j), state, reaction, ws);
        }
        const double change = sup_diff(state, previous);
        if (change <= options.tolerance * sup_norm(state)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("periodic mosquito solve did not converge within " +
                               std::to_string(options.max_periods) + " periods");
    }
    std::vector<double> rows((steps + 1) * n);
    std::copy(state.begin(), state.end(), rows.begin());
    for (std::size_t j = 0; j < steps; ++j) {
        stepper.step(static_cast<std::int64_t>(j), state, reaction, ws);
        std::copy(state.begin(), state.end(), rows.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
    }
    return PeriodicOrbit(period, steps, n, std::move(rows));
}

void check_mosquito_inputs(const DemographicParams& p, const SpatialGrid& grid) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid.node(k);
        if (p.recruitment.scan_min(x, 97) < 0.0) throw InvalidArgument("Lambda must be nonnegative");
        if (!(p.mosquito_death.scan_min(x, 97) > 0.0)) throw InvalidArgument("eta must be positive");
    }
}

// Cumulative integral on a uniform grid with an even number of intervals:
// Simpson on [0, t_{2m}], plus a one-interval quadratic rule for odd nodes.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 2; i < f.size(); i += 2) {
        out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    }
    for (std::size_t i = 1; i < f.size(); i += 2) {
        out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    }
    return out;
}

}  // namespace

std::vector<double> solve_human_steady_state(const DemographicParams& p, const SpatialGrid& grid,
                                             const SteadyStateOptions& options) {
    const std::size_t n = grid.size();
    if (p.human_override) {
        if (!(*p.human_override > 0.0)) throw InvalidArgument("human population override must be positive");
        return std::vector<double>(n, *p.human_override);
    }
    if (!(p.death > 0.0 && p.death < p.birth)) throw InvalidArgument("requires 0 < d < b");
    std::vector<double> K(n);
    for (std::size_t k = 0; k < n; ++k) {
        K[k] = p.carrying_capacity(0.0, grid.node(k));
        if (!(K[k] > 0.0)) throw InvalidArgument("carrying capacity must be positive");
    }
    auto logistic = [&](std::span<const double> u, std::span<double> rate) {
        for (std::size_t k = 0; k < n; ++k) {
            const double birth = u[k] <= K[k] ? p.birth * (1.0 - u[k] / K[k]) : 0.0;
            rate[k] = (birth - p.death) * u[k];
        }
    };
    // Backward-Euler diffusion keeps the pseudo-time march stable for any D_h;
    // its fixed points are exactly the discrete steady states.
    const double dt = std::min(1.0, 0.5 / p.birth);
    const ImexStepper stepper(grid, n, {p.diffusion_h}, dt, 1.0);
    const DiffusionOperator laplacian(grid, p.diffusion_h);
    auto ws = stepper.make_workspace();
    std::vector<double> N(n);
    for (std::size_t k = 0; k < n; ++k) N[k] = 0.5 * K[k];
    std::vector<double> lap(n);
    std::vector<double> rate(n);
    auto reaction = [&](std::int64_t, std::span<const double> u, std::span<double> r) { logistic(u, r); };
    for (std::size_t it = 0; it < options.max_steps; ++it) {
        laplacian.apply(N, lap);
        logistic(N, rate);
        double residual = 0.0;
        for (std::size_t k = 0; k < n; ++k) residual = std::max(residual, std::abs(lap[k] + rate[k]));
        if (residual < options.tolerance) {
            if (*std::min_element(N.begin(), N.end()) <= 0.0) {
                throw ConvergenceError("human steady state collapsed to a nonpositive value");
            }
            return N;
        }
        stepper.step(static_cast<std::int64_t>(it), N, reaction, ws);
    }
    throw ConvergenceError("human steady state: residual above tolerance after " +
                           std::to_string(options.max_steps) + " steps");
}

PeriodicOrbit solve_periodic_mosquito(const DemographicParams& p, const SpatialGrid& grid,
                                      const PeriodicSolveOptions& options) {
    if (p.mosquito_override) {
        if (!(*p.mosquito_override >= 0.0)) throw InvalidArgument("mosquito override must be nonnegative");
        return PeriodicOrbit::constant(p.period, std::vector<double>(grid.size(), *p.mosquito_override));
    }
    check_mosquito_inputs(p, grid);
    const std::size_t steps = options.steps_per_period;
    const ImexStepper stepper(grid, grid.size(), {p.diffusion_v}, p.period / static_cast<double>(steps));
    return periodic_linear_source(stepper, tabulate(p.recruitment, grid, steps, p.period),
                                  tabulate(p.mosquito_death, grid, steps, p.period), p.period, options);
}

PeriodicOrbit averaged_periodic_solution(const CoefficientSampler& recruitment,
                                         const CoefficientSampler& death, double period,
                                         std::size_t samples) {
    const std::size_t refine = 4;
    const std::size_t q = samples * refine;
    const double h = period / static_cast<double>(q);
    std::vector<double> lam(q + 1);
    std::vector<double> eta(q + 1);
    for (std::size_t i = 0; i <= q; ++i) {
        const double t = h * static_cast<double>(i);
        recruitment(t, std::span<double>(&lam[i], 1));
        death(t, std::span<double>(&eta[i], 1));
    }
    const auto E = cumulative_simpson(eta, h);
    if (!(E[q] > 0.0)) throw InvalidArgument("averaged death rate must have positive period integral");
    std::vector<double> weighted(q + 1);
    for (std::size_t i = 0; i <= q; ++i) weighted[i] = lam[i] * std::exp(E[i]);
    const auto G = cumulative_simpson(weighted, h);
    const double offset = G[q] / std::expm1(E[q]);
    std::vector<double> rows(samples + 1);
    for (std::size_t j = 0; j <= samples; ++j) {
        const std::size_t i = j * refine;
        rows[j] = (G[i] + offset) * std::exp(-E[i]);
    }
    return PeriodicOrbit(period, samples, 1, std::move(rows));
}

LimitFields limit_fields(const DemographicParams& p, const SpatialGrid& grid,
                         const PeriodicSolveOptions& options) {
    const std::size_t n = grid.size();
    const std::size_t steps = options.steps_per_period;
    if (p.mosquito_override) {
        // A pinned M* stands for Lambda = eta * M*, so both limits coincide with it.
        auto constant = PeriodicOrbit::constant(p.period, std::vector<double>(n, *p.mosquito_override));
        return LimitFields{constant, PeriodicOrbit::constant(p.period, {*p.mosquito_override})};
    }
    check_mosquito_inputs(p, grid);
    const ImexStepper pointwise(std::nullopt, n, {0.0}, p.period / static_cast<double>(steps));
    auto m0 = periodic_linear_source(pointwise, tabulate(p.recruitment, grid, steps, p.period),
                                     tabulate(p.mosquito_death, grid, steps, p.period), p.period, options);

    auto averaged = [&grid](const CoefficientField& f) -> CoefficientSampler {
        return [sampler = f.sampler(grid), grid, buffer = std::vector<double>(grid.size())](
                   double t, std::span<double> out) mutable {
            sampler(t, buffer);
            out[0] = grid.mean(buffer);
        };
    };
    auto minf = averaged_periodic_solution(averaged(p.recruitment), averaged(p.mosquito_death),
                                           p.period, steps);
    return LimitFields{std::move(m0), std::move(minf)};
}

}  // namespace twostrain
