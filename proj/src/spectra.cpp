#include "twostrain/spectra.hpp"

#include "twostrain/error.hpp"
#include "twostrain/power_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twostrain {

NextGenProblem::NextGenProblem(const LinearPeriodicSystem& system, std::size_t steps_per_period)
    : propagator_(std::make_shared<const PeriodicPropagator>(system, steps_per_period)) {}

double monodromy_radius(const NextGenProblem& prob, double lambda, const SolverSettings& settings) {
    if (!(lambda > 0.0)) throw InvalidArgument("monodromy_radius requires lambda > 0");
    const auto& P = prob.propagator();
    const auto map = P.map(1.0 / lambda);
    if (P.dofs() <= kDenseDofLimit) return dense_spectral_radius(assemble_dense(map, P.dofs()));
    const auto res = spectral_radius_power(map, P.dofs(), settings.power_tol, settings.power_max_iter);
    if (!res.converged) {
        throw ConvergenceError("power iteration did not converge at lambda = " + std::to_string(lambda));
    }
    return res.radius;
}

SpectralResult reproduction_number(const NextGenProblem& prob, const SolverSettings& settings) {
    if (!(settings.bisection_tol > 0.0)) throw InvalidArgument("bisection tolerance must be positive");
    SpectralResult out;
    out.nodes = prob.nodes();
    out.steps = prob.steps_per_period();
    auto radius = [&](double lambda) {
        ++out.evaluations;
        return monodromy_radius(prob, lambda, settings);
    };
    out.radius_at_one = radius(1.0);
    if (!prob.has_transmission()) {
        out.radius_at_value = out.radius_at_one;
        return out;
    }

    // Invariant: r(lo) >= 1 > r(hi).
    double lo = 1.0, hi = 1.0, r_lo = out.radius_at_one, r_hi = out.radius_at_one;
    if (out.radius_at_one >= 1.0) {
        int k = 0;
        for (hi = 2.0; (r_hi = radius(hi)) >= 1.0; hi *= 2.0) {
            lo = hi;
            r_lo = r_hi;
            if (++k >= settings.max_doublings) throw ConvergenceError("no upper bracket for R");
        }
    } else {
        int k = 0;
        for (lo = 0.5; (r_lo = radius(lo)) < 1.0; lo *= 0.5) {
            hi = lo;
            r_hi = r_lo;
            if (++k >= settings.max_doublings) throw ConvergenceError("no lower bracket for R");
        }
    }

    // log r is close to linear in log lambda, so interpolate there, then probe
    // just across the estimate to shrink the bracket from both sides.
    const double tol = settings.bisection_tol;
    for (int it = 0; hi - lo > tol * lo; ++it) {
        if (it > 200) throw ConvergenceError("R bisection stalled");
        const double width = hi - lo;
        double c = std::sqrt(lo * hi);
        const double gl = std::log(r_lo), gh = std::log(r_hi);
        if (it % 4 != 3 && gl > gh) {
            const double t = gl / (gl - gh);
            const double guess = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
            if (guess > lo && guess < hi) c = guess;
        }
        const double rc = radius(c);
        (rc >= 1.0 ? lo : hi) = c;
        (rc >= 1.0 ? r_lo : r_hi) = rc;
        if (hi - lo <= tol * lo) break;
        const double nudge = 0.4 * tol * c;
        const double other = rc >= 1.0 ? c + nudge : c - nudge;
        if (other > lo && other < hi && hi - lo < 0.5 * width) {
            const double ro = radius(other);
            (ro >= 1.0 ? lo : hi) = other;
            (ro >= 1.0 ? r_lo : r_hi) = ro;
        }
    }
    out.value = 0.5 * (lo + hi);
    out.bracket_width = (hi - lo) / out.value;
    out.radius_at_value = radius(out.value);
    return out;
}

namespace {

std::vector<double> nodal(const CoefficientField& f, const SpatialGrid& grid, double t) {
    std::vector<double> v(grid.size());
    f.sample(t, grid, v);
    return v;
}

CoefficientSampler constant_sampler(double value) {
    return [value](double, std::span<double> out) { std::fill(out.begin(), out.end(), value); };
}

LinearPeriodicSystem spatial_system(const TwoStrainModel& model, Strain s) {
    const auto& p = model.params();
    LinearPeriodicSystem sys;
    sys.grid = p.grid;
    sys.nodes = p.grid.size();
    sys.diffusion_u = p.diffusion_h;
    sys.diffusion_v = p.diffusion_v;
    sys.period = p.period;
    sys.decay_u = constant_sampler(p.death + p.strain(s).gamma);
    sys.decay_v = p.eta.sampler(p.grid);
    return sys;
}

}  // namespace

LinearPeriodicSystem basic_system(const TwoStrainModel& model, Strain s) {
    const auto& p = model.params();
    auto sys = spatial_system(model, s);
    const auto& sp = p.strain(s);
    sys.coupling_uv = [beta = p.beta.sampler(p.grid), c = sp.c](double t, std::span<double> out) {
        beta(t, out);
        for (double& v : out) v *= c;
    };
    sys.coupling_vu = [&p, beta = p.beta.sampler(p.grid), a = sp.alpha,
                       m = std::vector<double>(p.grid.size())](double t, std::span<double> out) mutable {
        beta(t, out);
        p.mosquitoes.evaluate(t, m);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * out[k] * p.p * m[k] / (p.l * p.humans[k]);
    };
    return sys;
}

LinearPeriodicSystem invasion_system(const TwoStrainModel& model, Strain invader,
                                     const PeriodicOrbit& resident) {
    const auto& p = model.params();
    const std::size_t n = p.grid.size();
    if (resident.width() != 2 * n) throw InvalidArgument("resident orbit must have width 2n");
    auto sys = spatial_system(model, invader);
    const auto& sp = p.strain(invader);
    auto orbit = std::make_shared<const PeriodicOrbit>(resident);
    sys.coupling_uv = [&p, orbit, beta = p.beta.sampler(p.grid), c = sp.c,
                       e = std::vector<double>(2 * n)](double t, std::span<double> out) mutable {
        beta(t, out);
        orbit->evaluate(t, e);
        const std::size_t n = out.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double S = p.humans[k] - e[k];
            out[k] = c * out[k] * p.l * S / (p.p * e[k] + p.l * S);
        }
    };
    sys.coupling_vu = [&p, orbit, beta = p.beta.sampler(p.grid), a = sp.alpha,
                       e = std::vector<double>(2 * n),
                       m = std::vector<double>(n)](double t, std::span<double> out) mutable {
        beta(t, out);
        orbit->evaluate(t, e);
        p.mosquitoes.evaluate(t, m);
        const std::size_t n = out.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double S = p.humans[k] - e[k];
            out[k] = a * out[k] * p.p * std::max(m[k] - e[n + k], 0.0) / (p.p * e[k] + p.l * S);
        }
    };
    return sys;
}

BasicNumbers basic_numbers(const TwoStrainModel& model, const SolverSettings& settings) {
    BasicNumbers out;
    for (Strain s : {Strain::Sensitive, Strain::Resistant}) {
        out.strain[index(s)] =
            reproduction_number(NextGenProblem(basic_system(model, s), model.steps_per_period()), settings);
    }
    out.r0 = std::max(out.strain[0].value, out.strain[1].value);
    return out;
}

std::array<InvasionNumber, 2> invasion_numbers(const TwoStrainModel& model, const BasicNumbers& basic,
                                               const SolverSettings& settings, const OrbitOptions& orbit) {
    std::array<InvasionNumber, 2> out;
    for (Strain s : {Strain::Sensitive, Strain::Resistant}) {
        const Strain resident = other(s);
        auto& slot = out[index(s)];
        if (basic.strain[index(resident)].value <= 1.0) {
            slot.resident_trivial = true;
            slot.result = basic.strain[index(s)];
            continue;
        }
        const auto e = single_strain_periodic_orbit(model, resident, orbit, /*expect_positive=*/true);
        slot.resident_periods = e.periods;
        slot.result = reproduction_number(
            NextGenProblem(invasion_system(model, s, e.orbit), model.steps_per_period()), settings);
    }
    return out;
}

std::vector<SpectralResult> local_r0_profile(const TwoStrainModel& model, Strain s,
                                             const PeriodicOrbit& m0, const SolverSettings& settings) {
    const auto& p = model.params();
    const std::size_t n = p.grid.size();
    if (m0.width() != n) throw InvalidArgument("M0 must have one column per grid node");
    const auto& sp = p.strain(s);
    std::vector<SpectralResult> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = p.grid.node(k);
        LinearPeriodicSystem sys;
        sys.nodes = 1;
        sys.period = p.period;
        sys.decay_u = constant_sampler(p.death + sp.gamma);
        sys.decay_v = [&p, x](double t, std::span<double> o) { o[0] = p.eta(t, x); };
        sys.coupling_uv = [&p, x, c = sp.c](double t, std::span<double> o) { o[0] = c * p.beta(t, x); };
        sys.coupling_vu = [&p, &m0, x, k, a = sp.alpha](double t, std::span<double> o) {
            o[0] = a * p.beta(t, x) * p.p * m0.at(t, k) / (p.l * p.humans[k]);
        };
        out.push_back(reproduction_number(NextGenProblem(sys, model.steps_per_period()), settings));
    }
    return out;
}

SpectralResult averaged_r0_infinity(const TwoStrainModel& model, Strain s, const PeriodicOrbit& minf,
                                    const SolverSettings& settings) {
    const auto& p = model.params();
    if (minf.width() != 1) throw InvalidArgument("M~inf must be spatially uniform (width 1)");
    const auto& sp = p.strain(s);
    const auto& grid = p.grid;
    LinearPeriodicSystem sys;
    sys.nodes = 1;
    sys.period = p.period;
    sys.decay_u = constant_sampler(p.death + sp.gamma);
    sys.decay_v = [&p, &grid](double t, std::span<double> o) { o[0] = grid.mean(nodal(p.eta, grid, t)); };
    sys.coupling_uv = [&p, &grid, c = sp.c](double t, std::span<double> o) {
        o[0] = c * grid.mean(nodal(p.beta, grid, t));
    };
    sys.coupling_vu = [&p, &grid, &minf, a = sp.alpha](double t, std::span<double> o) {
        auto f = nodal(p.beta, grid, t);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = a * f[k] * p.p / (p.l * p.humans[k]);
        o[0] = grid.mean(f) * minf.at(t, 0);
    };
    return reproduction_number(NextGenProblem(sys, model.steps_per_period()), settings);
}

std::vector<VectorBiasRow> vector_bias_scaling(const ModelParams& params, const std::vector<double>& q,
                                               const SolverSettings& settings) {
    std::vector<VectorBiasRow> rows;
    rows.reserve(q.size());
    for (double qi : q) {
        if (!(qi > 0.0 && qi <= 1.0)) throw InvalidArgument("q must lie in (0, 1]");
        ModelParams pq = params;
        pq.l = qi * pq.p;
        const TwoStrainModel model(std::move(pq));
        const auto b = basic_numbers(model, settings);
        VectorBiasRow row;
        row.q = qi;
        row.r = {b.strain[0].value, b.strain[1].value};
        row.r0 = b.r0;
        row.r0_sqrt_q = b.r0 * std::sqrt(qi);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace twostrain
