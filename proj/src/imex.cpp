#include "twostrain/imex.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cmath>

namespace twostrain {

ImexStepper::ImexStepper(std::optional<SpatialGrid> grid, std::size_t nodes,
                         std::vector<double> diffusion, double dt, double theta)
    : nodes_(nodes), dt_(dt), theta_(theta) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
    if (!(theta >= 0.5 && theta <= 1.0)) throw InvalidArgument("theta must lie in [1/2, 1]");
    if (nodes == 0 || diffusion.empty()) throw InvalidArgument("stepper needs nodes and components");
    if (grid && grid->size() != nodes) throw InvalidArgument("grid size does not match node count");
    components_.resize(diffusion.size());
    for (std::size_t c = 0; c < diffusion.size(); ++c) {
        const double D = diffusion[c];
        if (!(D >= 0.0)) throw InvalidArgument("diffusion coefficients must be nonnegative");
        if (D == 0.0) continue;
        if (!grid) throw InvalidArgument("positive diffusion requires a spatial grid");
        components_[c].op.emplace(*grid, D);
        components_[c].solver.emplace(*components_[c].op, theta_ * dt_);
    }
}

ImexStepper::Workspace ImexStepper::make_workspace() const {
    const std::size_t m = dofs();
    return Workspace{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m),
                     std::vector<double>(m)};
}

void ImexStepper::explicit_half(std::span<const double> u, std::span<double> out) const {
    const double scale = (1.0 - theta_) * dt_;
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto in_c = u.subspan(c * nodes_, nodes_);
        auto out_c = out.subspan(c * nodes_, nodes_);
        if (components_[c].op && scale > 0.0) {
            components_[c].op->apply_shifted(scale, in_c, out_c);
        } else {
            std::copy(in_c.begin(), in_c.end(), out_c.begin());
        }
    }
}

void ImexStepper::implicit_solve(std::span<double> rhs) const {
    for (std::size_t c = 0; c < components_.size(); ++c) {
        if (components_[c].solver) components_[c].solver->solve(rhs.subspan(c * nodes_, nodes_));
    }
}

}  // namespace twostrain
