#include "twostrain/model.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cmath>

namespace twostrain {

std::string to_string(Strain s) { return s == Strain::Sensitive ? "1" : "2"; }

void ModelParams::validate() const {
    const std::size_t n = grid.size();
    if (steps_per_period == 0) throw InvalidArgument("steps_per_period must be positive");
    if (!(period > 0.0)) throw InvalidArgument("period must be positive");
    if (!(diffusion_h >= 0.0) || !(diffusion_v >= 0.0)) throw InvalidArgument("diffusion must be nonnegative");
    if (!(death >= 0.0)) throw InvalidArgument("human death rate must be nonnegative");
    if (!(l > 0.0 && p >= l)) throw InvalidArgument("bite preferences must satisfy p >= l > 0");
    for (const auto& s : strains) {
        if (!(s.gamma > 0.0)) throw InvalidArgument("recovery rates must be positive");
        if (!(s.alpha >= 0.0 && s.alpha <= 1.0) || !(s.c >= 0.0 && s.c <= 1.0)) {
            throw InvalidArgument("transmission probabilities must lie in [0, 1]");
        }
    }
    if (humans.size() != n) throw InvalidArgument("human density must be sampled on the grid");
    if (std::any_of(humans.begin(), humans.end(), [](double v) { return !(v > 0.0); })) {
        throw InvalidArgument("human density must be positive");
    }
    if (mosquitoes.width() != n) throw InvalidArgument("mosquito orbit width must match the grid");
    if (mosquitoes.min_value() < 0.0) throw InvalidArgument("mosquito density must be nonnegative");
    if (std::abs(mosquitoes.period() - period) > 1e-12 * period) {
        throw InvalidArgument("mosquito orbit period differs from the model period");
    }
}

EpidemicState::EpidemicState(std::size_t nodes, std::int64_t step, double t)
    : nodes_(nodes), step_(step), time_(t), values_(kComponents * nodes, 0.0) {}

}  // namespace twostrain
