#include "twostrain/periodic_orbit.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twostrain {

PeriodicOrbit::PeriodicOrbit(double period, std::size_t samples, std::size_t width,
                             std::vector<double> rows)
    : period_(period), samples_(samples), width_(width), rows_(std::move(rows)) {
    if (!(period > 0.0)) throw InvalidArgument("orbit period must be positive");
    if (samples == 0 || width == 0 || rows_.size() != (samples + 1) * width) {
        throw InvalidArgument("orbit storage must hold samples+1 rows of the stated width");
    }
}

PeriodicOrbit PeriodicOrbit::constant(double period, std::vector<double> row) {
    const std::size_t width = row.size();
    std::vector<double> rows(row);
    rows.insert(rows.end(), row.begin(), row.end());
    return PeriodicOrbit(period, 1, width, std::move(rows));
}

std::span<const double> PeriodicOrbit::row(std::size_t j) const {
    return {rows_.data() + j * width_, width_};
}

void PeriodicOrbit::evaluate(double t, std::span<double> out) const {
    double tau = std::fmod(t, period_);
    if (tau < 0.0) tau += period_;
    const double s = tau / period_ * static_cast<double>(samples_);
    const auto j = std::min(static_cast<std::size_t>(s), samples_ - 1);
    const double w = s - static_cast<double>(j);
    const auto a = row(j);
    const auto b = row(j + 1);
    for (std::size_t i = 0; i < width_; ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
}

double PeriodicOrbit::at(double t, std::size_t index) const {
    std::vector<double> tmp(width_);
    evaluate(t, tmp);
    return tmp[index];
}

void PeriodicOrbit::evaluate_step(std::size_t j, std::size_t steps, std::span<double> out) const {
    const std::size_t num = (j % steps) * samples_;
    const std::size_t base = num / steps;
    const std::size_t rem = num % steps;
    const auto a = row(base);
    if (rem == 0) {
        std::copy(a.begin(), a.end(), out.begin());
        return;
    }
    const double w = static_cast<double>(rem) / static_cast<double>(steps);
    const auto b = row(base + 1);
    for (std::size_t i = 0; i < width_; ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
}

double PeriodicOrbit::periodicity_residual() const {
    const auto first = row(0);
    const auto last = row(samples_);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < width_; ++i) {
        diff = std::max(diff, std::abs(last[i] - first[i]));
        scale = std::max(scale, std::abs(first[i]));
    }
    return diff / std::max(scale, std::numeric_limits<double>::min());
}

double PeriodicOrbit::min_value() const { return *std::min_element(rows_.begin(), rows_.end()); }

double PeriodicOrbit::max_value() const { return *std::max_element(rows_.begin(), rows_.end()); }

}  // namespace twostrain
