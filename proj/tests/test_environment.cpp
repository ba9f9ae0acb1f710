#include "twostrain/environment.hpp"
#include "twostrain/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace twostrain;
using std::numbers::pi;

namespace {

PeriodicSolveOptions coarse() {
    PeriodicSolveOptions o;
    o.steps_per_period = 600;
    return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("human steady state with constant K is K (1 - d/b)") {
    DemographicParams p;
    p.birth = 0.1;
    const SpatialGrid g(pi, 21);
    const auto N = solve_human_steady_state(p, g);
    const double expected = 110.0 * (1.0 - p.death / p.birth);
    for (double v : N) CHECK(rel(v, expected) <= 1e-8);
}

TEST_CASE("human steady state is positive for heterogeneous K") {
    DemographicParams p;
    p.birth = 0.05;
    p.carrying_capacity = CoefficientField::constant(110.0, 12.0, SpatialProfile{0.5, 1.0});
    const SpatialGrid g(pi, 31);
    const auto N = solve_human_steady_state(p, g);
    for (double v : N) CHECK(v > 0.0);
    CHECK(N.front() > N.back());  // K is largest at x = 0
}

TEST_CASE("human steady state requires 0 < d < b") {
    DemographicParams p;
    p.birth = p.death / 2;
    CHECK_THROWS_AS(solve_human_steady_state(p, SpatialGrid(pi, 5)), InvalidArgument);
}

TEST_CASE("pinned populations bypass the solvers") {
    DemographicParams p;
    p.human_override = 110.0;
    p.mosquito_override = 220.0;
    const SpatialGrid g(pi, 7);
    for (double v : solve_human_steady_state(p, g)) CHECK(v == 110.0);
    const auto M = solve_periodic_mosquito(p, g);
    CHECK(M.min_value() == 220.0);
    CHECK(M.max_value() == 220.0);
}

TEST_CASE("constant Lambda and eta: M*, M0 and M~inf all equal Lambda/eta") {
    DemographicParams p;  // Lambda = 176, eta = 0.8 -> 220
    const SpatialGrid g(pi, 11);
    const auto M = solve_periodic_mosquito(p, g, coarse());
    const auto lim = limit_fields(p, g, coarse());
    CHECK(M.periodicity_residual() <= 1e-9);
    CHECK(rel(M.min_value(), 220.0) <= 1e-8);
    CHECK(rel(M.max_value(), 220.0) <= 1e-8);
    CHECK(rel(lim.small_diffusion.min_value(), 220.0) <= 1e-8);
    CHECK(rel(lim.small_diffusion.max_value(), 220.0) <= 1e-8);
    CHECK(rel(lim.large_diffusion.at(5.0, 0), 220.0) <= 1e-8);
}

TEST_CASE("heterogeneous Lambda(x), constant eta: per-node fixed points and the averaged value") {
    DemographicParams p;
    p.recruitment = CoefficientField::constant(176.0, 12.0, SpatialProfile{0.5, 1.0});
    const SpatialGrid g(pi, 21);
    const auto lim = limit_fields(p, g, coarse());
    std::vector<double> row(g.size());
    lim.small_diffusion.evaluate(7.0, row);
    std::vector<double> lam(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        lam[k] = p.recruitment(0.0, g.node(k));
        CHECK(rel(row[k], lam[k] / 0.8) <= 1e-8);
    }
    CHECK(rel(lim.large_diffusion.at(2.0, 0), g.mean(lam) / 0.8) <= 1e-8);

    // With diffusion the periodic state has the same mean and lies between the extremes.
    const auto M = solve_periodic_mosquito(p, g, coarse());
    std::vector<double> m(g.size());
    M.evaluate(0.0, m);
    CHECK(rel(g.mean(m), g.mean(lam) / 0.8) <= 1e-8);
    CHECK(M.min_value() > 0.0);
}

TEST_CASE("closed-form averaged solution matches long-time RK4 of the averaged ODE") {
    const double w = 2 * pi / 12;
    auto lambda = [w](double t) { return 176.0 * (1 + 0.5 * std::cos(w * t)); };
    auto eta = [w](double t) { return 0.8 * (1 + 0.3 * std::sin(w * t)); };
    const CoefficientSampler L = [&](double t, std::span<double> o) { o[0] = lambda(t); };
    const CoefficientSampler E = [&](double t, std::span<double> o) { o[0] = eta(t); };
    const auto closed = averaged_periodic_solution(L, E, 12.0, 2400);
    CHECK(closed.periodicity_residual() <= 1e-9);

    // Independent route: integrate M' = lambda - eta M for 40 periods with RK4.
    auto f = [&](double t, double m) { return lambda(t) - eta(t) * m; };
    const int per_period = 12000;
    const double h = 12.0 / per_period;
    double m = 0.0, t = 0.0;
    for (int i = 0; i < 40 * per_period; ++i) {
        const double k1 = f(t, m), k2 = f(t + h / 2, m + h / 2 * k1), k3 = f(t + h / 2, m + h / 2 * k2),
                     k4 = f(t + h, m + h * k3);
        m += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t = (i + 1) * h;
    }
    double worst = 0.0;
    for (int i = 0; i <= per_period; ++i) {
        if (i % 1000 == 0) worst = std::max(worst, rel(closed.at(i * h, 0), m));
        const double k1 = f(t, m), k2 = f(t + h / 2, m + h / 2 * k1), k3 = f(t + h / 2, m + h / 2 * k2),
                     k4 = f(t + h, m + h * k3);
        m += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("seasonal Lambda gives a positive periodic M* with small residual") {
    DemographicParams p;
    p.recruitment = CoefficientField::fourier(176.0, {Harmonic{80.0, 30.0}}, 12.0, SpatialProfile{0.3, 2.0});
    const SpatialGrid g(pi, 21);
    const auto M = solve_periodic_mosquito(p, g, coarse());
    CHECK(M.periodicity_residual() <= 1e-9);
    CHECK(M.min_value() > 0.0);
}

TEST_CASE("nonpositive eta is rejected") {
    DemographicParams p;
    p.mosquito_death = CoefficientField::constant(0.0);
    CHECK_THROWS_AS(solve_periodic_mosquito(p, SpatialGrid(pi, 5), coarse()), InvalidArgument);
}
