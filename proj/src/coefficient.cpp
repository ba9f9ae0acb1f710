#include "twostrain/coefficient.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace twostrain {

namespace {

double wrap(double t, double period) {
    double tau = std::fmod(t, period);
    if (tau < 0.0) tau += period;
    return tau;
}

void check_period(double period) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidArgument("coefficient period must be positive and finite");
    }
}

}  // namespace

double SpatialProfile::operator()(double x) const {
    return uniform() ? 1.0 : 1.0 + amplitude * std::cos(wavenumber * x);
}

CoefficientField CoefficientField::constant(double value, double period, SpatialProfile profile) {
    check_period(period);
    CoefficientField f;
    f.kind_ = Kind::Constant;
    f.period_ = period;
    f.mean_ = value;
    f.profile_ = profile;
    return f;
}

CoefficientField CoefficientField::fourier(double mean, std::vector<Harmonic> harmonics,
                                           double period, SpatialProfile profile) {
    check_period(period);
    CoefficientField f;
    f.kind_ = Kind::Fourier;
    f.period_ = period;
    f.mean_ = mean;
    f.harmonics_ = std::move(harmonics);
    f.profile_ = profile;
    return f;
}

CoefficientField CoefficientField::sampled(double period, double length, std::size_t samples,
                                           std::size_t nodes, std::vector<double> values) {
    check_period(period);
    if (samples == 0 || nodes < 2 || values.size() != samples * nodes || !(length > 0.0)) {
        throw InvalidArgument("sampled coefficient: inconsistent shape");
    }
    CoefficientField f;
    f.kind_ = Kind::Sampled;
    f.period_ = period;
    f.data_ = std::make_shared<const SampledData>(SampledData{length, samples, nodes, std::move(values)});
    return f;
}

bool CoefficientField::spatially_uniform() const {
    if (kind_ != Kind::Sampled) return profile_.uniform();
    const auto& d = *data_;
    for (std::size_t j = 0; j < d.samples; ++j) {
        const double* row = d.values.data() + j * d.nodes;
        if (std::any_of(row, row + d.nodes, [&](double v) { return v != row[0]; })) return false;
    }
    return true;
}

double CoefficientField::temporal(double t) const {
    if (kind_ == Kind::Constant) return scale_ * mean_;
    const double w = 2.0 * std::numbers::pi / period_;
    const double tau = wrap(t, period_);
    double sum = mean_;
    for (std::size_t k = 0; k < harmonics_.size(); ++k) {
        const double arg = static_cast<double>(k + 1) * w * tau;
        sum += harmonics_[k].cos_coef * std::cos(arg) + harmonics_[k].sin_coef * std::sin(arg);
    }
    return scale_ * sum;
}

double CoefficientField::sampled_value(double t, double x) const {
    const auto& d = *data_;
    const double s = wrap(t, period_) / period_ * static_cast<double>(d.samples);
    auto j0 = static_cast<std::size_t>(s);
    const double wt = s - static_cast<double>(j0);
    j0 %= d.samples;
    const std::size_t j1 = (j0 + 1) % d.samples;
    const double h = d.length / static_cast<double>(d.nodes - 1);
    const double r = std::clamp(x / h, 0.0, static_cast<double>(d.nodes - 1));
    const auto k0 = std::min(static_cast<std::size_t>(r), d.nodes - 2);
    const double wx = r - static_cast<double>(k0);
    auto at = [&](std::size_t j, std::size_t k) { return d.values[j * d.nodes + k]; };
    const double v0 = (1.0 - wx) * at(j0, k0) + wx * at(j0, k0 + 1);
    const double v1 = (1.0 - wx) * at(j1, k0) + wx * at(j1, k0 + 1);
    return scale_ * ((1.0 - wt) * v0 + wt * v1);
}

double CoefficientField::operator()(double t, double x) const {
    if (kind_ == Kind::Sampled) return sampled_value(t, x);
    return temporal(t) * profile_(x);
}

void CoefficientField::sample(double t, const SpatialGrid& grid, std::span<double> out) const {
    if (kind_ == Kind::Sampled) {
        for (std::size_t k = 0; k < grid.size(); ++k) out[k] = sampled_value(t, grid.node(k));
        return;
    }
    const double v = temporal(t);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = v * profile_(grid.node(k));
}

CoefficientSampler CoefficientField::sampler(const SpatialGrid& grid) const {
    if (kind_ == Kind::Sampled) {
        return [field = *this, grid](double t, std::span<double> out) { field.sample(t, grid, out); };
    }
    std::vector<double> shape(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) shape[k] = profile_(grid.node(k));
    return [field = *this, shape = std::move(shape)](double t, std::span<double> out) {
        const double v = field.temporal(t);
        for (std::size_t k = 0; k < shape.size(); ++k) out[k] = v * shape[k];
    };
}

CoefficientField CoefficientField::scaled(double factor) const {
    CoefficientField f = *this;
    f.scale_ *= factor;
    return f;
}

double CoefficientField::time_mean(double x) const {
    if (kind_ != Kind::Sampled) return scale_ * mean_ * profile_(x);
    const auto& d = *data_;
    double sum = 0.0;
    for (std::size_t j = 0; j < d.samples; ++j) {
        sum += sampled_value(period_ * static_cast<double>(j) / static_cast<double>(d.samples), x);
    }
    return sum / static_cast<double>(d.samples);
}

double CoefficientField::scan_min(double x, std::size_t points) const {
    double lo = (*this)(0.0, x);
    for (std::size_t i = 1; i < points; ++i) {
        lo = std::min(lo, (*this)(period_ * static_cast<double>(i) / static_cast<double>(points), x));
    }
    return lo;
}

CoefficientField seasonal_beta_preset() {
    // Coefficients of the bracketed series; the overall factor 4 is applied below.
    const std::vector<Harmonic> base = {
        {-1.83692, -1.37079}, {-0.175817, 0.296267}, {-0.166233, 0.2134},
        {-0.16485, -0.295228}, {-0.17681, -0.201712}};
    std::vector<Harmonic> h;
    h.reserve(base.size());
    for (const auto& b : base) h.push_back({4.0 * b.cos_coef, 4.0 * b.sin_coef});
    return CoefficientField::fourier(4.0 * 5.1492, std::move(h), 12.0);
}

CoefficientField seasonal_beta_two_param(double a0, double b0) {
    if (!(a0 >= 0.0)) throw InvalidArgument("a0 must be nonnegative");
    if (!(b0 >= 0.0 && b0 <= 1.0)) throw InvalidArgument("b0 must lie in [0, 1]");
    return CoefficientField::fourier(a0, {{-a0 * b0, 0.0}}, 12.0);
}

}  // namespace twostrain
