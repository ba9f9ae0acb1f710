#include "twostrain/error.hpp"
#include "twostrain/grid.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

using namespace twostrain;
using std::numbers::pi;

namespace {

Eigen::MatrixXd dense(const DiffusionOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        A(k, k) = op.diag()[i];
        if (k > 0) A(k, k - 1) = op.lower()[i];
        if (k + 1 < n) A(k, k + 1) = op.upper()[i];
    }
    return A;
}

}  // namespace

TEST_CASE("grid rejects fewer than three nodes and bad lengths") {
    CHECK_THROWS_AS(SpatialGrid(1.0, 2), InvalidArgument);
    CHECK_THROWS_AS(SpatialGrid(0.0, 5), InvalidArgument);
    CHECK_THROWS_AS(SpatialGrid(-1.0, 5), InvalidArgument);
    const SpatialGrid g(pi, 101);
    CHECK(g.spacing() == doctest::Approx(pi / 100).epsilon(1e-15));
    CHECK(g.node(100) == doctest::Approx(pi));
}

TEST_CASE("trapezoid mean and linear interpolation") {
    const SpatialGrid g(2.0, 5);
    std::vector<double> f{0, 1, 2, 3, 4};  // f = 2x
    CHECK(g.mean(f) == doctest::Approx(2.0));
    CHECK(g.interpolate(f, 0.75) == doctest::Approx(1.5));
    CHECK(g.interpolate(f, 2.0) == doctest::Approx(4.0));
    CHECK(g.interpolate(f, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("Neumann Laplacian: zero row sums, constants in the kernel") {
    const SpatialGrid g(pi, 17);
    const DiffusionOperator op(g, 0.4);
    std::vector<double> one(g.size(), 3.0), out(g.size());
    op.apply(one, out);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(op.row_sum(k) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(out[k] == 0.0);
    }
    // Ghost-point boundary rows: D * 2 (u1 - u0) / h^2.
    const double c = 0.4 / (g.spacing() * g.spacing());
    CHECK(op.diag()[0] == doctest::Approx(-2 * c));
    CHECK(op.upper()[0] == doctest::Approx(2 * c));
    CHECK(op.lower()[16] == doctest::Approx(2 * c));
}

TEST_CASE("shifted apply keeps constants exactly") {
    const SpatialGrid g(pi, 33);
    const DiffusionOperator op(g, 0.4);
    std::vector<double> u(g.size(), 110.0), out(g.size());
    op.apply_shifted(0.7, u, out);
    for (double v : out) CHECK(v == 110.0);
}

TEST_CASE("discrete Laplacian of cos 2x within 1e-4 at n = 401") {
    const SpatialGrid g(pi, 401);
    const DiffusionOperator op(g, 1.0);
    std::vector<double> u(g.size()), out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) u[k] = std::cos(2 * g.node(k));
    op.apply(u, out);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(out[k] + 4 * u[k]));
    CHECK(err <= 1e-4);
}

TEST_CASE("Thomas solve matches a dense solve") {
    const SpatialGrid g(pi, 9);
    const DiffusionOperator op(g, 0.4);
    const double scale = 0.05;
    const ShiftedTridiagonalSolver solver(op, scale);
    std::vector<double> rhs{1, -2, 3, 0.5, 0, 7, -1, 2, 4};
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), 9);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(9, 9) - scale * dense(op);
    const Eigen::VectorXd x = M.partialPivLu().solve(b);
    solver.solve(rhs);
    for (int i = 0; i < 9; ++i) CHECK(rhs[static_cast<std::size_t>(i)] == doctest::Approx(x(i)).epsilon(1e-12));
}

TEST_CASE("implicit solve has a nonnegative inverse") {
    const SpatialGrid g(1.0, 12);
    const DiffusionOperator op(g, 2.0);
    const ShiftedTridiagonalSolver solver(op, 0.5);
    for (std::size_t j = 0; j < g.size(); ++j) {
        std::vector<double> e(g.size(), 0.0);
        e[j] = 1.0;
        solver.solve(e);
        for (double v : e) CHECK(v >= 0.0);
    }
}

TEST_CASE("negative diffusion coefficient is rejected") {
    const SpatialGrid g(1.0, 5);
    CHECK_THROWS_AS(DiffusionOperator(g, -1.0), InvalidArgument);
}
