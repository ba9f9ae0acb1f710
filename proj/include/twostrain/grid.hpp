#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace twostrain {

/// Uniform node-centred mesh on [0, L]: x_k = k*h, h = L/(n-1), n >= 3.
class SpatialGrid {
public:
    SpatialGrid(double length, std::size_t nodes);

    double length() const noexcept { return length_; }
    std::size_t size() const noexcept { return nodes_; }
    double spacing() const noexcept { return spacing_; }
    double node(std::size_t k) const noexcept { return static_cast<double>(k) * spacing_; }
    std::vector<double> nodes() const;

    /// Composite trapezoid average |Omega|^-1 * integral of f.
    double mean(std::span<const double> f) const;

    /// Piecewise-linear interpolation of nodal values at an arbitrary x in [0, L].
    double interpolate(std::span<const double> f, double x) const;

    bool operator==(const SpatialGrid&) const = default;

private:
    double length_;
    std::size_t nodes_;
    double spacing_;
};

/// Tridiagonal stencil of D*Laplacian with ghost-point zero-flux closure.
///
/// Interior rows are D*(u[k-1] - 2u[k] + u[k+1])/h^2. The ghost value at each
/// end mirrors the first interior neighbour, so the boundary rows become
/// D*(2u[1] - 2u[0])/h^2 and D*(2u[n-2] - 2u[n-1])/h^2. Every row sums to zero.
class DiffusionOperator {
public:
    DiffusionOperator(const SpatialGrid& grid, double coefficient);

    const SpatialGrid& grid() const noexcept { return grid_; }
    double coefficient() const noexcept { return coefficient_; }
    std::size_t size() const noexcept { return diag_.size(); }

    // lower()[k] couples row k to k-1 (lower()[0] unused), upper()[k] couples k to k+1.
    const std::vector<double>& lower() const noexcept { return lower_; }
    const std::vector<double>& diag() const noexcept { return diag_; }
    const std::vector<double>& upper() const noexcept { return upper_; }

    double row_sum(std::size_t k) const;

    /// out = A u
    void apply(std::span<const double> u, std::span<double> out) const;

    /// out = u + scale * A u
    void apply_shifted(double scale, std::span<const double> u, std::span<double> out) const;

private:
    SpatialGrid grid_;
    double coefficient_;
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
};

DiffusionOperator build_neumann_laplacian(const SpatialGrid& grid, double coefficient);

/// Pre-factored Thomas solver for (I - scale * A), A a DiffusionOperator.
///
/// For scale >= 0 the matrix is a strictly diagonally dominant M-matrix, so the
/// factorization never breaks down and the inverse is entrywise nonnegative.
class ShiftedTridiagonalSolver {
public:
    ShiftedTridiagonalSolver(const DiffusionOperator& op, double scale);

    std::size_t size() const noexcept { return inv_pivot_.size(); }

    /// Solves in place: rhs <- (I - scale*A)^-1 rhs.
    void solve(std::span<double> rhs) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_mod_;
    std::vector<double> inv_pivot_;
};

}  // namespace twostrain
