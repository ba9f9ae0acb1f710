#include "twostrain/power_iteration.hpp"

#include "twostrain/error.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace twostrain {

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Returns the estimate of r(map) where `map` may be P or P^2.
PowerIterationResult iterate(const LinearMap& map, std::size_t dofs, double tol, int max_iter) {
    std::vector<double> x(dofs, 1.0 / std::sqrt(static_cast<double>(dofs)));
    std::vector<double> y(dofs);
    PowerIterationResult result;
    double previous = -1.0;
    for (int it = 1; it <= max_iter; ++it) {
        map(x, y);
        const double ny = norm2(y);
        result.iterations = it;
        if (ny == 0.0) {
            result.radius = 0.0;
            result.converged = true;
            return result;
        }
        // Growth past the double range: the radius is known to be huge, report +inf.
        if (!std::isfinite(ny)) {
            result.radius = std::numeric_limits<double>::infinity();
            result.converged = true;
            return result;
        }
        // x has unit norm, so the growth factor is ||y||.
        result.radius = ny;
        if (previous >= 0.0 && std::abs(ny - previous) <= tol * ny) {
            result.converged = true;
            return result;
        }
        previous = ny;
        for (std::size_t i = 0; i < dofs; ++i) x[i] = y[i] / ny;
    }
    return result;
}

}  // namespace

PowerIterationResult spectral_radius_power(const LinearMap& map, std::size_t dofs, double tol,
                                           int max_iter) {
    if (dofs == 0) throw InvalidArgument("power iteration needs at least one degree of freedom");
    if (!(tol > 0.0) || max_iter < 1) throw InvalidArgument("power iteration: bad tol or max_iter");

    auto direct = iterate(map, dofs, tol, max_iter);
    if (direct.converged) return direct;

    std::vector<double> mid(dofs);
    const LinearMap squared = [&](std::span<const double> in, std::span<double> out) {
        map(in, mid);
        map(mid, out);
    };
    auto twice = iterate(squared, dofs, tol, max_iter);
    PowerIterationResult result;
    result.radius = std::sqrt(twice.radius);
    result.iterations = direct.iterations + 2 * twice.iterations;
    result.converged = twice.converged;
    result.used_squared_map = true;
    return result;
}

Eigen::MatrixXd assemble_dense(const LinearMap& map, std::size_t dofs) {
    if (dofs > kDenseDofLimit) {
        throw InvalidArgument("dense monodromy assembly limited to " +
                              std::to_string(kDenseDofLimit) + " degrees of freedom");
    }
    const auto n = static_cast<Eigen::Index>(dofs);
    Eigen::MatrixXd matrix(n, n);
    std::vector<double> e(dofs, 0.0);
    std::vector<double> column(dofs);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        map(e, column);
        e[static_cast<std::size_t>(j)] = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) matrix(i, j) = column[static_cast<std::size_t>(i)];
    }
    return matrix;
}

double dense_spectral_radius(const Eigen::MatrixXd& matrix) {
    if (!matrix.allFinite()) return std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigen-solve failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace twostrain
