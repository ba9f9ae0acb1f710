#include "twostrain/periodic_linear.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cmath>

namespace twostrain {

namespace {

std::vector<double> tabulate(const CoefficientSampler& sampler, std::size_t nodes,
                             std::size_t steps, double period, const char* name) {
    if (!sampler) throw InvalidArgument(std::string("missing coefficient: ") + name);
    std::vector<double> table((steps + 1) * nodes);
    for (std::size_t j = 0; j < steps; ++j) {
        const double t = period * static_cast<double>(j) / static_cast<double>(steps);
        std::span<double> row(table.data() + j * nodes, nodes);
        sampler(t, row);
        for (double v : row) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InvalidArgument(std::string("coefficient ") + name +
                                      " must be finite and nonnegative");
            }
        }
    }
    std::copy_n(table.begin(), nodes, table.begin() + static_cast<std::ptrdiff_t>(steps * nodes));
    return table;
}

}  // namespace

PeriodicPropagator::PeriodicPropagator(const LinearPeriodicSystem& system,
                                       std::size_t steps_per_period)
    : nodes_(system.nodes),
      steps_(steps_per_period),
      period_(system.period),
      stepper_(system.grid, system.nodes, {system.diffusion_u, system.diffusion_v},
               system.period / static_cast<double>(steps_per_period)) {
    if (steps_per_period == 0) throw InvalidArgument("steps per period must be positive");
    if (!(system.period > 0.0)) throw InvalidArgument("period must be positive");
    decay_u_ = tabulate(system.decay_u, nodes_, steps_, period_, "decay_u");
    decay_v_ = tabulate(system.decay_v, nodes_, steps_, period_, "decay_v");
    coupling_uv_ = tabulate(system.coupling_uv, nodes_, steps_, period_, "coupling_uv");
    coupling_vu_ = tabulate(system.coupling_vu, nodes_, steps_, period_, "coupling_vu");
    has_coupling_ = std::any_of(coupling_uv_.begin(), coupling_uv_.end(), [](double v) { return v > 0.0; }) ||
                    std::any_of(coupling_vu_.begin(), coupling_vu_.end(), [](double v) { return v > 0.0; });
}

void PeriodicPropagator::advance(std::span<double> state, std::size_t first, std::size_t count,
                                 double coupling_scale, ImexStepper::Workspace& ws) const {
    const std::size_t n = nodes_;
    auto reaction = [&](std::int64_t index, std::span<const double> y, std::span<double> rate) {
        const std::size_t row = static_cast<std::size_t>(index) % steps_ * n;
        const double* a = decay_u_.data() + row;
        const double* b = decay_v_.data() + row;
        const double* f12 = coupling_uv_.data() + row;
        const double* f21 = coupling_vu_.data() + row;
        const double* u = y.data();
        const double* v = y.data() + n;
        for (std::size_t k = 0; k < n; ++k) {
            rate[k] = -a[k] * u[k] + coupling_scale * f12[k] * v[k];
            rate[n + k] = -b[k] * v[k] + coupling_scale * f21[k] * u[k];
        }
    };
    for (std::size_t j = first; j < first + count; ++j) {
        stepper_.step(static_cast<std::int64_t>(j), state, reaction, ws);
    }
}

void PeriodicPropagator::propagate(std::span<const double> in, std::span<double> out,
                                   double coupling_scale) const {
    std::copy(in.begin(), in.end(), out.begin());
    auto ws = stepper_.make_workspace();
    advance(out, 0, steps_, coupling_scale, ws);
}

LinearMap PeriodicPropagator::map(double coupling_scale) const {
    return [this, coupling_scale](std::span<const double> in, std::span<double> out) {
        propagate(in, out, coupling_scale);
    };
}

}  // namespace twostrain
