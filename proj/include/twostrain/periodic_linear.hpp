#pragma once

#include "twostrain/grid.hpp"
#include "twostrain/imex.hpp"
#include "twostrain/power_iteration.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace twostrain {

/// Writes the nodal values of a coefficient at time t into `out`.
using CoefficientSampler = std::function<void(double t, std::span<double> out)>;

/// Cooperative linear periodic pair
///
///   u_t = D_u Lap u - a(t,x) u + s f12(t,x) v
///   v_t = D_v Lap v - b(t,x) v + s f21(t,x) u
///
/// with period `period`, zero-flux boundaries and a coupling scale s chosen at
/// propagation time. With no grid (pointwise problems) both D must be zero.
struct LinearPeriodicSystem {
    std::optional<SpatialGrid> grid;
    std::size_t nodes = 0;
    double diffusion_u = 0.0;
    double diffusion_v = 0.0;
    double period = 12.0;
    CoefficientSampler decay_u;
    CoefficientSampler decay_v;
    CoefficientSampler coupling_uv;
    CoefficientSampler coupling_vu;
};

/// One-period solution operator of a LinearPeriodicSystem, applied matrix-free.
///
/// Coefficients are tabulated once on the step grid t_j = j*period/steps.
class PeriodicPropagator {
public:
    PeriodicPropagator(const LinearPeriodicSystem& system, std::size_t steps_per_period);

    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t dofs() const noexcept { return 2 * nodes_; }
    std::size_t steps_per_period() const noexcept { return steps_; }
    double period() const noexcept { return period_; }

    /// False when both couplings vanish identically on the step grid.
    bool has_coupling() const noexcept { return has_coupling_; }

    /// out = P(s) in, with P(s) the period map at coupling scale s.
    void propagate(std::span<const double> in, std::span<double> out, double coupling_scale) const;

    LinearMap map(double coupling_scale) const;

    /// Advance `state` across steps [first, first+count) at coupling scale s.
    void advance(std::span<double> state, std::size_t first, std::size_t count,
                 double coupling_scale, ImexStepper::Workspace& ws) const;

private:
    std::size_t nodes_;
    std::size_t steps_;
    double period_;
    ImexStepper stepper_;
    // Row j holds nodal values at t_j; row `steps_` repeats row 0.
    std::vector<double> decay_u_;
    std::vector<double> decay_v_;
    std::vector<double> coupling_uv_;
    std::vector<double> coupling_vu_;
    bool has_coupling_ = false;
};

}  // namespace twostrain
