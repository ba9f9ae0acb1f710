#include "twostrain/grid.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace twostrain {

SpatialGrid::SpatialGrid(double length, std::size_t nodes)
    : length_(length), nodes_(nodes), spacing_(0.0) {
    if (nodes < 3) {
        throw InvalidArgument("SpatialGrid needs at least 3 nodes, got " + std::to_string(nodes));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw InvalidArgument("SpatialGrid length must be positive and finite");
    }
    spacing_ = length / static_cast<double>(nodes - 1);
}

std::vector<double> SpatialGrid::nodes() const {
    std::vector<double> x(nodes_);
    for (std::size_t k = 0; k < nodes_; ++k) x[k] = node(k);
    return x;
}

double SpatialGrid::mean(std::span<const double> f) const {
    assert(f.size() == nodes_);
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k + 1 < nodes_; ++k) sum += f[k];
    return sum * spacing_ / length_;
}

double SpatialGrid::interpolate(std::span<const double> f, double x) const {
    assert(f.size() == nodes_);
    const double s = std::clamp(x / spacing_, 0.0, static_cast<double>(nodes_ - 1));
    const auto k = std::min(static_cast<std::size_t>(s), nodes_ - 2);
    const double w = s - static_cast<double>(k);
    return (1.0 - w) * f[k] + w * f[k + 1];
}

DiffusionOperator::DiffusionOperator(const SpatialGrid& grid, double coefficient)
    : grid_(grid), coefficient_(coefficient) {
    if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
        throw InvalidArgument("diffusion coefficient must be finite and nonnegative");
    }
    const std::size_t n = grid.size();
    const double c = coefficient / (grid.spacing() * grid.spacing());
    lower_.assign(n, c);
    upper_.assign(n, c);
    diag_.assign(n, -2.0 * c);
    lower_[0] = 0.0;
    upper_[0] = 2.0 * c;
    lower_[n - 1] = 2.0 * c;
    upper_[n - 1] = 0.0;
}

double DiffusionOperator::row_sum(std::size_t k) const {
    return lower_[k] + diag_[k] + upper_[k];
}

void DiffusionOperator::apply(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = diag_.size();
    assert(u.size() == n && out.size() == n);
    out[0] = diag_[0] * u[0] + upper_[0] * u[1];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = lower_[k] * u[k - 1] + diag_[k] * u[k] + upper_[k] * u[k + 1];
    }
    out[n - 1] = lower_[n - 1] * u[n - 2] + diag_[n - 1] * u[n - 1];
}

void DiffusionOperator::apply_shifted(double scale, std::span<const double> u,
                                      std::span<double> out) const {
    const std::size_t n = diag_.size();
    assert(u.size() == n && out.size() == n);
    // Written as u + scale*(sum of neighbour differences) so constants map to
    // themselves exactly: each difference of equal values is exactly zero.
    const double c0 = upper_[0];
    out[0] = u[0] + scale * (c0 * (u[1] - u[0]));
    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = u[k] + scale * (lower_[k] * (u[k - 1] - u[k]) + upper_[k] * (u[k + 1] - u[k]));
    }
    out[n - 1] = u[n - 1] + scale * (lower_[n - 1] * (u[n - 2] - u[n - 1]));
}

DiffusionOperator build_neumann_laplacian(const SpatialGrid& grid, double coefficient) {
    return DiffusionOperator(grid, coefficient);
}

ShiftedTridiagonalSolver::ShiftedTridiagonalSolver(const DiffusionOperator& op, double scale) {
    if (!(scale >= 0.0)) throw InvalidArgument("implicit scale must be nonnegative");
    const std::size_t n = op.size();
    lower_.resize(n);
    upper_mod_.resize(n);
    inv_pivot_.resize(n);
    const auto& lo = op.lower();
    const auto& di = op.diag();
    const auto& up = op.upper();
    double prev_upper = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = -scale * lo[k];
        const double m = 1.0 - scale * di[k];
        const double c = -scale * up[k];
        const double pivot = (k == 0) ? m : m - a * prev_upper;
        assert(pivot > 0.0);
        lower_[k] = a;
        inv_pivot_[k] = 1.0 / pivot;
        upper_mod_[k] = c * inv_pivot_[k];
        prev_upper = upper_mod_[k];
    }
}

void ShiftedTridiagonalSolver::solve(std::span<double> rhs) const {
    const std::size_t n = inv_pivot_.size();
    assert(rhs.size() == n);
    rhs[0] *= inv_pivot_[0];
    for (std::size_t k = 1; k < n; ++k) {
        rhs[k] = (rhs[k] - lower_[k] * rhs[k - 1]) * inv_pivot_[k];
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        rhs[k] -= upper_mod_[k] * rhs[k + 1];
    }
}

}  // namespace twostrain
