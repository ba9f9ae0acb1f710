#include "twostrain/dynamics.hpp"
#include "twostrain/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace twostrain;
using std::numbers::pi;

namespace {

// Homogeneous baseline setting with the given strain line.
ModelParams baseline(std::size_t n, std::size_t steps, std::array<StrainParams, 2> strains) {
    ModelParams p;
    p.grid = SpatialGrid(pi, n);
    p.steps_per_period = steps;
    p.strains = strains;
    p.beta = seasonal_beta_preset();
    p.humans.assign(n, 110.0);
    p.mosquitoes = PeriodicOrbit::constant(12.0, std::vector<double>(n, 220.0));
    return p;
}

const std::array<StrainParams, 2> kCase1{StrainParams{0.096, 0.56, 0.25}, StrainParams{0.082, 0.6, 0.2}};
const std::array<StrainParams, 2> kCase2{StrainParams{0.083, 0.35, 0.2}, StrainParams{0.082, 0.55, 0.1}};
const std::array<StrainParams, 2> kCase3{StrainParams{0.096, 0.55, 0.15}, StrainParams{0.082, 0.45, 0.2}};

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("infection forces at the disease-free state") {
    auto p = baseline(5, 240, kCase1);
    const EpidemicState zero(5, 0, 2.0);
    const auto f = infection_forces(p, zero);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(f.j1[k] == doctest::Approx(0.25 * p.beta(2.0, 0.0)));
        CHECK(f.j3[k] == doctest::Approx(0.2 * p.beta(2.0, 0.0)));
        CHECK(f.j2[k] == 0.0);
        CHECK(f.j4[k] == 0.0);
    }
}

TEST_CASE("infection forces with every human infected") {
    auto p = baseline(5, 240, kCase1);
    EpidemicState s(5, 0, 0.0);
    for (std::size_t k = 0; k < 5; ++k) {
        s.field(kI1)[k] = 60.0;
        s.field(kI2)[k] = 50.0;
    }
    const auto f = infection_forces(p, s);
    CHECK(f.j1[2] == 0.0);
    CHECK(f.j3[2] == 0.0);
    CHECK(f.j2[2] > 0.0);
}

TEST_CASE("infection forces with unbiased biting: hand value 4.5454...") {
    auto p = baseline(5, 240, kCase1);
    p.p = p.l = 0.5;
    p.beta = CoefficientField::constant(20.0);
    EpidemicState s(5, 0, 0.0);
    for (std::size_t k = 0; k < 5; ++k) s.field(kI1)[k] = 10.0;
    const auto f = infection_forces(p, s);
    CHECK(f.j1[0] == doctest::Approx(0.25 * 20.0 * 100.0 / 110.0).epsilon(1e-14));
    CHECK(f.j1[0] == doctest::Approx(4.545454545454).epsilon(1e-12));
}

TEST_CASE("infection forces reject states outside X(t)") {
    auto p = baseline(5, 240, kCase1);
    EpidemicState s(5, 0, 0.0);
    s.field(kI1)[1] = 80.0;
    s.field(kI2)[1] = 40.0;
    CHECK_THROWS_AS(infection_forces(p, s), InvalidArgument);
    EpidemicState neg(5, 0, 0.0);
    neg.field(kIv2)[0] = -1.0;
    CHECK_THROWS_AS(infection_forces(p, neg), InvalidArgument);
}

TEST_CASE("model parameter validation") {
    auto p = baseline(5, 240, kCase1);
    p.p = 0.2;
    p.l = 0.8;
    CHECK_THROWS_AS(TwoStrainModel{p}, InvalidArgument);
    p = baseline(5, 240, kCase1);
    p.strains[1].alpha = 1.5;
    CHECK_THROWS_AS(TwoStrainModel{p}, InvalidArgument);
    p = baseline(5, 240, kCase1);
    p.strains[0].gamma = 0.0;
    CHECK_THROWS_AS(TwoStrainModel{p}, InvalidArgument);
    CHECK(baseline(5, 240, kCase1).q() == doctest::Approx(0.25));
}

TEST_CASE("disease-free state is an equilibrium") {
    const TwoStrainModel model(baseline(11, 240, kCase1));
    const EpidemicState zero(11, 0, 0.0);
    const auto next = model.step_full(zero);
    for (double v : next.values()) CHECK(v == 0.0);
    CHECK(next.step() == 1);
    CHECK(next.time() == doctest::Approx(model.dt()));
}

TEST_CASE("embedding a single-strain state reproduces the single-strain stepper bitwise") {
    const TwoStrainModel model(baseline(21, 240, kCase1));
    auto ws = model.make_workspace();
    for (Strain s : {Strain::Sensitive, Strain::Resistant}) {
        EpidemicState full = figure_initial_state(model.grid());
        auto absent = full.strain(other(s));
        std::fill(absent.begin(), absent.end(), 0.0);
        std::vector<double> pair(full.strain(s).begin(), full.strain(s).end());
        for (std::int64_t j = 0; j < 300; ++j) {
            model.step(full, ws);
            model.step_single(s, pair, j, ws);
        }
        const auto embedded = full.strain(s);
        CHECK(std::equal(pair.begin(), pair.end(), embedded.begin()));
        for (double v : full.strain(other(s))) CHECK(v == 0.0);
    }
}

TEST_CASE("time self-convergence on Case-1 data: order >= 1.8") {
    auto final_state = [](std::size_t steps) {
        const TwoStrainModel model(baseline(21, steps, kCase1));
        SimulationOptions o;
        o.t_end = 1.0;
        o.burn_in = 1.0;
        return simulate(model, figure_initial_state(model.grid()), o).final_state;
    };
    const auto a = final_state(480), b = final_state(960), c = final_state(1920);
    const double e1 = max_abs_diff(a.values(), b.values());
    const double e2 = max_abs_diff(b.values(), c.values());
    MESSAGE("Richardson order " << std::log2(e1 / e2));
    CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("excursions beyond the clamp tolerance abort the step") {
    const TwoStrainModel model(baseline(11, 240, kCase1));
    EpidemicState bad(11, 0, 0.0);
    for (std::size_t k = 0; k < 11; ++k) bad.field(kI1)[k] = 300.0;
    auto ws = model.make_workspace();
    CHECK_THROWS_AS(model.step(bad, ws), InvariantViolation);
}

TEST_CASE("simulate rejects initial data outside X(0)") {
    const TwoStrainModel model(baseline(11, 240, kCase1));
    EpidemicState bad(11, 0, 0.0);
    bad.field(kIv1)[3] = 500.0;
    CHECK_THROWS_AS(simulate(model, bad, {}), InvalidArgument);
}

TEST_CASE("zero initial data: identically zero trajectory, all metrics zero") {
    const TwoStrainModel model(baseline(11, 240, kCase1));
    SimulationOptions o;
    o.t_end = 48.0;
    o.burn_in = 24.0;
    std::size_t calls = 0;
    o.record_stride = 24;
    const auto s = simulate(model, EpidemicState(11, 0, 0.0), o, [&](const EpidemicState& st) {
        ++calls;
        for (double v : st.values()) CHECK(v == 0.0);
    });
    CHECK(calls == 1 + 4 * 240 / 24);
    for (std::size_t c = 0; c < kComponents; ++c) {
        CHECK(s.persistence.floor[c] == 0.0);
        CHECK(s.persistence.ceiling[c] == 0.0);
    }
    CHECK(classify(s.persistence, 1e-6) == Regime::DiseaseFree);
}

TEST_CASE("Case 1 over 600 months: positive floors, invariant box and positivity hold") {
    const TwoStrainModel model(baseline(41, 1200, kCase1));
    const auto s = simulate(model, figure_initial_state(model.grid()), {});
    for (std::size_t c = 0; c < kComponents; ++c) CHECK(s.persistence.floor[c] > 1.0);
    CHECK(s.max_residual <= 1e-10);
    CHECK(s.positivity_ok);
    CHECK(classify(s.persistence, 1e-6) == Regime::Coexistence);
}

TEST_CASE("Cases 2 and 3: competitive exclusion after a long burn-in") {
    SimulationOptions o;
    o.t_end = 2400.0;
    o.burn_in = 1800.0;
    {
        const TwoStrainModel model(baseline(11, 600, kCase2));
        const auto s = simulate(model, figure_initial_state(model.grid()), o);
        CHECK(s.persistence.floor[kI1] > 1.0);
        CHECK(s.persistence.ceiling[kI2] < 1e-6);
        CHECK(classify(s.persistence, 1e-6) == Regime::SensitiveOnly);
    }
    {
        const TwoStrainModel model(baseline(11, 600, kCase3));
        const auto s = simulate(model, figure_initial_state(model.grid()), o);
        CHECK(s.persistence.floor[kI2] > 1.0);
        CHECK(s.persistence.ceiling[kI1] < 1e-6);
        CHECK(classify(s.persistence, 1e-6) == Regime::ResistantOnly);
    }
}

TEST_CASE("persistence monitor ignores states before the burn-in") {
    EpidemicState early(3, 0, 1.0), late(3, 10, 5.0);
    std::fill(early.values().begin(), early.values().end(), 100.0);
    std::fill(late.values().begin(), late.values().end(), 2.0);
    late.field(kI2)[1] = 0.5;
    const std::vector<EpidemicState> traj{early, late};
    const auto m = persistence_metrics(traj, 4.0);
    CHECK(m.samples == 1);
    CHECK(m.ceiling[kI1] == 2.0);
    CHECK(m.floor[kI2] == 0.5);
}

TEST_CASE("Case-1 boundary orbit: positive, inside the box, a fixed point of the period map") {
    const TwoStrainModel model(baseline(41, 1200, kCase1));
    const auto e = single_strain_periodic_orbit(model, Strain::Sensitive, {}, true);
    CHECK_FALSE(e.trivial);
    const std::size_t n = model.nodes();
    const auto& orbit = e.orbit;
    CHECK(orbit.width() == 2 * n);
    for (std::size_t j = 0; j <= orbit.samples(); ++j) {
        const auto row = orbit.row(j);
        const auto M = model.mosquitoes_at(static_cast<std::int64_t>(j));
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(row[k] > 0.0);
            CHECK(row[k] < 110.0);
            CHECK(row[n + k] > 0.0);
            CHECK(row[n + k] < M[k]);
        }
    }
    // One more period from the stored start reproduces it.
    std::vector<double> pair(orbit.row(0).begin(), orbit.row(0).end());
    auto ws = model.make_workspace();
    for (std::size_t j = 0; j < model.steps_per_period(); ++j) {
        model.step_single(Strain::Sensitive, pair, static_cast<std::int64_t>(j), ws);
    }
    double scale = 0.0;
    for (double v : orbit.row(0)) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(pair, orbit.row(0)) <= 1e-8 * scale);
    CHECK(orbit.periodicity_residual() <= 1e-8);
}

TEST_CASE("no transmission: the boundary orbit is zero") {
    auto p = baseline(11, 240, kCase1);
    p.beta = CoefficientField::constant(0.0);
    const TwoStrainModel model(p);
    const auto e = single_strain_periodic_orbit(model, Strain::Resistant);
    CHECK(e.trivial);
    CHECK(e.orbit.max_value() == 0.0);
    CHECK_THROWS_AS(single_strain_periodic_orbit(model, Strain::Resistant, {}, true), InvariantViolation);
}

TEST_CASE("single-strain subsystem preserves the order of initial states") {
    const TwoStrainModel model(baseline(21, 240, kCase1));
    const std::size_t n = model.nodes();
    std::mt19937 rng(20240607);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto ws = model.make_workspace();
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<double> lo(2 * n), hi(2 * n);
        const double a = u(rng), b = u(rng), phase = 2 * pi * u(rng);
        for (std::size_t k = 0; k < n; ++k) {
            const double shape = 0.5 + 0.4 * std::cos(model.grid().node(k) + phase);
            hi[k] = 110.0 * a * shape;
            hi[n + k] = 220.0 * b * shape;
            lo[k] = hi[k] * u(rng) * 0.9;
            lo[n + k] = hi[n + k] * u(rng) * 0.9;
        }
        const Strain s = trial % 2 ? Strain::Resistant : Strain::Sensitive;
        bool ordered = true;
        for (std::int64_t j = 0; j < 960; ++j) {
            model.step_single(s, lo, j, ws);
            model.step_single(s, hi, j, ws);
            // Both converge to the same orbit; allow rounding once they meet.
            for (std::size_t i = 0; i < 2 * n; ++i) ordered = ordered && lo[i] <= hi[i] * (1.0 + 1e-12);
        }
        CHECK(ordered);
    }
}
