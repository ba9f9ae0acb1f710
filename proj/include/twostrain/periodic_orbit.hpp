#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace twostrain {

/// One period of a time-periodic field, sampled at t_j = j*period/samples for
/// j = 0..samples (the endpoint is stored so periodicity can be audited).
/// Each sample is a row of `width` values; values between samples are linear.
class PeriodicOrbit {
public:
    PeriodicOrbit(double period, std::size_t samples, std::size_t width, std::vector<double> rows);

    /// Time-independent orbit: every sample equals `row`.
    static PeriodicOrbit constant(double period, std::vector<double> row);

    double period() const noexcept { return period_; }
    std::size_t samples() const noexcept { return samples_; }
    std::size_t width() const noexcept { return width_; }

    std::span<const double> row(std::size_t j) const;

    /// Linear interpolation at time t (wrapped into [0, period)).
    void evaluate(double t, std::span<double> out) const;
    double at(double t, std::size_t index) const;

    /// Value at t = j*period/steps, computed with integer arithmetic so that
    /// matching sampling densities reproduce stored rows bit for bit.
    void evaluate_step(std::size_t j, std::size_t steps, std::span<double> out) const;

    /// ||row(samples) - row(0)||_inf / max(||row(0)||_inf, tiny).
    double periodicity_residual() const;

    double min_value() const;
    double max_value() const;

private:
    double period_;
    std::size_t samples_;
    std::size_t width_;
    std::vector<double> rows_;
};

}  // namespace twostrain
