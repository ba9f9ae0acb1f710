#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>

namespace twostrain {

/// A linear map applied matrix-free: out = P in.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct PowerIterationResult {
    double radius = 0.0;
    int iterations = 0;
    bool converged = false;
    /// True when the estimate came from iterating P*P (sign-alternating dominant pair).
    bool used_squared_map = false;
};

/// Dominant eigenvalue modulus by power iteration from the all-ones vector.
///
/// Stops when successive norm-ratio estimates agree to relative `tol`. If that
/// fails within `max_iter`, the two-period map P^2 is iterated instead and the
/// square root reported. `converged == false` means both attempts failed. A
/// propagated norm that overflows yields radius = +inf.
PowerIterationResult spectral_radius_power(const LinearMap& map, std::size_t dofs, double tol,
                                           int max_iter);

/// Largest value of `dofs` for which the dense monodromy path is allowed.
inline constexpr std::size_t kDenseDofLimit = 64;

/// Assembles P column by column from unit vectors. Throws above kDenseDofLimit.
Eigen::MatrixXd assemble_dense(const LinearMap& map, std::size_t dofs);

/// max |eigenvalue| of a dense matrix.
double dense_spectral_radius(const Eigen::MatrixXd& matrix);

}  // namespace twostrain
