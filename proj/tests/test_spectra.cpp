#include "twostrain/spectra.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace twostrain;
using std::numbers::pi;

namespace {

CoefficientSampler constant_sampler(double v) {
    return [v](double, std::span<double> out) { std::fill(out.begin(), out.end(), v); };
}

LinearPeriodicSystem pointwise(double a, double b, double f12, double f21) {
    LinearPeriodicSystem sys;
    sys.nodes = 1;
    sys.decay_u = constant_sampler(a);
    sys.decay_v = constant_sampler(b);
    sys.coupling_uv = constant_sampler(f12);
    sys.coupling_vu = constant_sampler(f21);
    return sys;
}

ModelParams homogeneous(std::size_t n, std::size_t steps, double beta, std::array<StrainParams, 2> strains) {
    ModelParams p;
    p.grid = SpatialGrid(pi, n);
    p.steps_per_period = steps;
    p.strains = strains;
    p.beta = CoefficientField::constant(beta);
    p.humans.assign(n, 110.0);
    p.mosquitoes = PeriodicOrbit::constant(12.0, std::vector<double>(n, 220.0));
    return p;
}

// Closed form for constant coefficients:
// R^2 = (c beta)(alpha beta p M*) / (l N (d + gamma) eta).
double oracle(const ModelParams& p, Strain s) {
    const auto& k = p.strain(s);
    const double beta = p.beta(0.0, 0.0);
    const double M = p.mosquitoes.row(0)[0];
    return std::sqrt(k.c * beta * k.alpha * beta * p.p * M /
                     (p.l * p.humans[0] * (p.death + k.gamma) * 0.8));
}

const std::array<StrainParams, 2> kCase1{StrainParams{0.096, 0.56, 0.25}, StrainParams{0.082, 0.6, 0.2}};

}  // namespace

TEST_CASE("no transmission: R = 0 and the one-period map contracts") {
    const NextGenProblem prob(pointwise(0.1, 0.8, 0.0, 0.0), 240);
    CHECK_FALSE(prob.has_transmission());
    CHECK(monodromy_radius(prob, 1.0) < 1.0);
    const auto r = reproduction_number(prob);
    CHECK(r.value == 0.0);
}

TEST_CASE("pointwise pair: lambda oracle sqrt(f12 f21 / (a b))") {
    const double a = 0.1, b = 0.8, f12 = 2.0, f21 = 0.3;
    const NextGenProblem prob(pointwise(a, b, f12, f21), 1200);
    SolverSettings s;
    s.bisection_tol = 1e-10;
    const auto r = reproduction_number(prob, s);
    CHECK(r.value == doctest::Approx(std::sqrt(f12 * f21 / (a * b))).epsilon(1e-6));
    CHECK(std::abs(monodromy_radius(prob, r.value, s) - 1.0) <= 1e-6);
    CHECK(r.radius_at_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.bracket_width <= 1e-10);
}

TEST_CASE("monodromy radius decreases as lambda grows") {
    const NextGenProblem prob(pointwise(0.1, 0.8, 2.0, 0.3), 240);
    double last = INFINITY;
    for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
        const double r = monodromy_radius(prob, lambda);
        CHECK(r < last);
        last = r;
    }
}

TEST_CASE("homogeneous constant-coefficient oracle within 1e-6") {
    const auto p = homogeneous(21, 2400, 0.9, kCase1);
    const TwoStrainModel model(p);
    SolverSettings s;
    s.bisection_tol = 1e-10;
    const auto b = basic_numbers(model, s);
    for (Strain k : {Strain::Sensitive, Strain::Resistant}) {
        const double want = oracle(p, k);
        CHECK(b.strain[index(k)].value == doctest::Approx(want).epsilon(1e-6));
    }
    CHECK(b.r0 == std::max(b.strain[0].value, b.strain[1].value));
}

TEST_CASE("swapping the strain lines swaps the outputs") {
    auto p = homogeneous(11, 240, 0.9, kCase1);
    p.beta = seasonal_beta_preset();
    const auto a = basic_numbers(TwoStrainModel(p));
    std::swap(p.strains[0], p.strains[1]);
    const auto b = basic_numbers(TwoStrainModel(p));
    CHECK(a.strain[0].value == doctest::Approx(b.strain[1].value).epsilon(1e-12));
    CHECK(a.strain[1].value == doctest::Approx(b.strain[0].value).epsilon(1e-12));
}

TEST_CASE("zero resident orbit: the invasion problem is the basic problem") {
    auto p = homogeneous(11, 240, 0.9, kCase1);
    p.strains[1].c = 1e-4;  // strain 2 cannot establish
    const TwoStrainModel model(p);
    const SolverSettings s;
    const auto basic = basic_numbers(model, s);
    REQUIRE(basic.strain[1].value < 1.0);
    const auto inv = invasion_numbers(model, basic, s);
    CHECK(inv[0].resident_trivial);
    CHECK(inv[0].result.value == basic.strain[0].value);

    // The same answer from the invasion linearization at the zero orbit.
    const PeriodicOrbit zero = PeriodicOrbit::constant(12.0, std::vector<double>(2 * model.nodes(), 0.0));
    const NextGenProblem direct(invasion_system(model, Strain::Sensitive, zero), model.steps_per_period());
    const auto r = reproduction_number(direct, s);
    CHECK(std::abs(r.value - basic.strain[0].value) <= 2 * s.bisection_tol * basic.strain[0].value);
}

TEST_CASE("a positive resident lowers the invader's number") {
    const auto p = homogeneous(11, 240, 0.9, kCase1);
    const TwoStrainModel model(p);
    const auto basic = basic_numbers(model);
    REQUIRE(basic.strain[1].value > 1.0);
    const auto inv = invasion_numbers(model, basic);
    CHECK_FALSE(inv[0].resident_trivial);
    CHECK(inv[0].result.value < basic.strain[0].value);
    CHECK(inv[0].result.value > 0.0);
}

TEST_CASE("threshold sign: R - 1 and r(P) - 1 agree") {
    for (double scale : {1.0, 0.05, 0.01}) {
        auto p = homogeneous(11, 240, 0.9, kCase1);
        p.beta = seasonal_beta_preset().scaled(scale);
        const TwoStrainModel model(p);
        const auto b = basic_numbers(model);
        for (const auto& r : b.strain) CHECK((r.value > 1.0) == (r.radius_at_one > 1.0));
    }
}

TEST_CASE("local profile and averaged limit agree with the pointwise oracle when homogeneous") {
    const auto p = homogeneous(7, 1200, 0.9, kCase1);
    const TwoStrainModel model(p);
    SolverSettings s;
    s.bisection_tol = 1e-10;
    const auto profile = local_r0_profile(model, Strain::Resistant, p.mosquitoes, s);
    REQUIRE(profile.size() == 7);
    const double want = oracle(p, Strain::Resistant);
    for (const auto& r : profile) CHECK(r.value == doctest::Approx(want).epsilon(1e-8));
    const auto avg = averaged_r0_infinity(model, Strain::Resistant, PeriodicOrbit::constant(12.0, {220.0}), s);
    CHECK(avg.value == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("vector bias: R0 sqrt(q) is constant and R0 falls with q") {
    auto p = homogeneous(11, 240, 0.9, kCase1);
    p.beta = seasonal_beta_preset();
    SolverSettings s;
    s.bisection_tol = 1e-9;
    const auto rows = vector_bias_scaling(p, {0.25, 0.5, 1.0}, s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].r0 / rows[2].r0 == doctest::Approx(2.0).epsilon(1e-6));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].r0 < rows[i - 1].r0);
        CHECK(rows[i].r0_sqrt_q == doctest::Approx(rows[0].r0_sqrt_q).epsilon(1e-6));
    }
}

TEST_CASE("reproduction_number rejects a nonpositive tolerance") {
    const NextGenProblem prob(pointwise(0.1, 0.8, 2.0, 0.3), 24);
    SolverSettings s;
    s.bisection_tol = 0.0;
    CHECK_THROWS(reproduction_number(prob, s));
}
