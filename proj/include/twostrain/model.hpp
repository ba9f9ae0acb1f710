#pragma once

#include "twostrain/coefficient.hpp"
#include "twostrain/grid.hpp"
#include "twostrain/periodic_orbit.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace twostrain {

enum class Strain : std::size_t { Sensitive = 0, Resistant = 1 };

inline constexpr std::size_t index(Strain s) noexcept { return static_cast<std::size_t>(s); }
inline constexpr Strain other(Strain s) noexcept {
    return s == Strain::Sensitive ? Strain::Resistant : Strain::Sensitive;
}
std::string to_string(Strain s);

/// Field order inside an EpidemicState; strain i owns the pair (2i, 2i+1).
enum Component : std::size_t { kI1 = 0, kIv1 = 1, kI2 = 2, kIv2 = 3 };
inline constexpr std::size_t kComponents = 4;

struct StrainParams {
    double gamma = 0.0;  // human recovery rate, month^-1
    double alpha = 0.0;  // human -> mosquito transmission probability per bite
    double c = 0.0;      // mosquito -> human transmission probability per bite
    bool operator==(const StrainParams&) const = default;
};

/// Everything the infection dynamics and the reproduction numbers depend on.
struct ModelParams {
    SpatialGrid grid{3.14159265358979323846, 101};
    std::size_t steps_per_period = 2400;
    double period = 12.0;
    double diffusion_h = 0.4;
    double diffusion_v = 0.02;
    double death = 1.0 / (72.0 * 12.0);
    double p = 0.8;  // pick probability for an infectious human
    double l = 0.2;  // pick probability for a susceptible human
    std::array<StrainParams, 2> strains{};
    CoefficientField beta = CoefficientField::constant(0.0);
    CoefficientField eta = CoefficientField::constant(0.8);
    std::vector<double> humans;           // N(x) on the grid
    PeriodicOrbit mosquitoes = PeriodicOrbit::constant(12.0, {0.0});  // M*(t,x), width grid.size()

    const StrainParams& strain(Strain s) const { return strains[index(s)]; }
    /// Relative attractivity of susceptible versus infectious hosts.
    double q() const noexcept { return l / p; }
    double dt() const noexcept { return period / static_cast<double>(steps_per_period); }

    /// Throws InvalidArgument naming the first violated constraint.
    void validate() const;
};

/// (I1, Iv1, I2, Iv2) on the grid at t = step * dt.
class EpidemicState {
public:
    EpidemicState() = default;
    EpidemicState(std::size_t nodes, std::int64_t step, double t);

    std::size_t nodes() const noexcept { return nodes_; }
    std::int64_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }
    void set_clock(std::int64_t step, double t) noexcept {
        step_ = step;
        time_ = t;
    }

    std::span<double> field(std::size_t c) { return {values_.data() + c * nodes_, nodes_}; }
    std::span<const double> field(std::size_t c) const { return {values_.data() + c * nodes_, nodes_}; }
    /// The (I_i, I_vi) pair, contiguous.
    std::span<double> strain(Strain s) { return {values_.data() + 2 * index(s) * nodes_, 2 * nodes_}; }
    std::span<const double> strain(Strain s) const {
        return {values_.data() + 2 * index(s) * nodes_, 2 * nodes_};
    }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool operator==(const EpidemicState&) const = default;

private:
    std::size_t nodes_ = 0;
    std::int64_t step_ = 0;
    double time_ = 0.0;
    std::vector<double> values_;
};

}  // namespace twostrain
