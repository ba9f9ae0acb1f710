#pragma once

#include "twostrain/grid.hpp"

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace twostrain {

/// Implicit-explicit stepper for m coupled fields sharing one grid.
///
/// Diffusion is integrated with the theta-method (theta = 1/2 is Crank-Nicolson),
/// the reaction with Heun's predictor-corrector:
///
///   (I - theta dt A) u*      = (I + (1-theta) dt A) u^n + dt R(t_n, u^n)
///   (I - theta dt A) u^{n+1} = (I + (1-theta) dt A) u^n + dt/2 [R(t_n, u^n) + R(t_{n+1}, u*)]
///
/// State layout is component-major: component c occupies [c*n, (c+1)*n).
/// Time is addressed by integer step index; t_j = j*dt.
class ImexStepper {
public:
    struct Workspace {
        std::vector<double> base;
        std::vector<double> predicted;
        std::vector<double> rate_start;
        std::vector<double> rate_end;
    };

    /// A grid is required whenever any diffusion coefficient is positive.
    ImexStepper(std::optional<SpatialGrid> grid, std::size_t nodes, std::vector<double> diffusion,
                double dt, double theta = 0.5);

    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t components() const noexcept { return components_.size(); }
    std::size_t dofs() const noexcept { return nodes_ * components_.size(); }
    double dt() const noexcept { return dt_; }
    double theta() const noexcept { return theta_; }

    Workspace make_workspace() const;

    /// Advances `state` from t_j to t_{j+1} in place.
    /// `reaction(index, state, rate)` must fill `rate` for time t_index.
    template <class Reaction>
    void step(std::int64_t j, std::span<double> state, Reaction&& reaction, Workspace& ws) const;

private:
    struct Component {
        std::optional<DiffusionOperator> op;
        std::optional<ShiftedTridiagonalSolver> solver;
    };

    void explicit_half(std::span<const double> u, std::span<double> out) const;
    void implicit_solve(std::span<double> rhs) const;

    std::size_t nodes_;
    double dt_;
    double theta_;
    std::vector<Component> components_;
};

template <class Reaction>
void ImexStepper::step(std::int64_t j, std::span<double> state, Reaction&& reaction,
                       Workspace& ws) const {
    const std::size_t m = dofs();
    assert(state.size() == m);
    reaction(j, std::span<const double>(state), std::span<double>(ws.rate_start));
    explicit_half(state, ws.base);
    for (std::size_t i = 0; i < m; ++i) ws.predicted[i] = ws.base[i] + dt_ * ws.rate_start[i];
    implicit_solve(ws.predicted);
    reaction(j + 1, std::span<const double>(ws.predicted), std::span<double>(ws.rate_end));
    const double half = 0.5 * dt_;
    for (std::size_t i = 0; i < m; ++i) {
        state[i] = ws.base[i] + half * (ws.rate_start[i] + ws.rate_end[i]);
    }
    implicit_solve(state);
}

}  // namespace twostrain
