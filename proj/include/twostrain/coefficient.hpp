#pragma once

#include "twostrain/grid.hpp"
#include "twostrain/periodic_linear.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace twostrain {

/// Multiplicative spatial shape 1 + amplitude*cos(wavenumber*x).
struct SpatialProfile {
    double amplitude = 0.0;
    double wavenumber = 1.0;

    double operator()(double x) const;
    bool uniform() const noexcept { return amplitude == 0.0; }
    bool operator==(const SpatialProfile&) const = default;
};

/// Coefficients of cos(k w t) and sin(k w t) for harmonic k = index + 1.
struct Harmonic {
    double cos_coef = 0.0;
    double sin_coef = 0.0;
    bool operator==(const Harmonic&) const = default;
};

/// An omega-periodic space-time coefficient such as beta, eta or Lambda.
///
/// Closed forms are separable: value(t, x) = temporal(t) * profile(x), with
/// temporal(t) either a constant or a truncated Fourier series in w = 2 pi/omega.
/// Sampled fields interpolate linearly in t (periodically) and in x.
class CoefficientField {
public:
    enum class Kind { Constant, Fourier, Sampled };

    static CoefficientField constant(double value, double period = 12.0, SpatialProfile profile = {});
    static CoefficientField fourier(double mean, std::vector<Harmonic> harmonics,
                                    double period = 12.0, SpatialProfile profile = {});
    /// `values` holds `samples` rows of `nodes` values at t_j = j*period/samples.
    static CoefficientField sampled(double period, double length, std::size_t samples,
                                    std::size_t nodes, std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    double period() const noexcept { return period_; }
    bool spatially_uniform() const;

    double operator()(double t, double x) const;
    /// Fills nodal values at time t.
    void sample(double t, const SpatialGrid& grid, std::span<double> out) const;
    /// Sampler bound to a grid; the spatial profile is evaluated once.
    CoefficientSampler sampler(const SpatialGrid& grid) const;

    CoefficientField scaled(double factor) const;

    /// Time average over one period at x (exact for closed forms).
    double time_mean(double x) const;
    /// min over t of value(t, x), scanned on `points` equispaced times.
    double scan_min(double x, std::size_t points) const;

    // Closed-form accessors; meaningless for Sampled.
    double mean() const noexcept { return mean_; }
    const std::vector<Harmonic>& harmonics() const noexcept { return harmonics_; }
    const SpatialProfile& profile() const noexcept { return profile_; }

private:
    struct SampledData {
        double length;
        std::size_t samples;
        std::size_t nodes;
        std::vector<double> values;
    };

    CoefficientField() = default;
    double temporal(double t) const;
    double sampled_value(double t, double x) const;

    Kind kind_ = Kind::Constant;
    double period_ = 12.0;
    double mean_ = 0.0;
    double scale_ = 1.0;
    std::vector<Harmonic> harmonics_;
    SpatialProfile profile_;
    std::shared_ptr<const SampledData> data_;
};

/// The five-harmonic seasonal biting rate (month^-1), period 12, mean 4*5.1492.
CoefficientField seasonal_beta_preset();

/// a0*(1 - b0*cos(2 pi t/12)); requires a0 >= 0 and b0 in [0, 1].
CoefficientField seasonal_beta_two_param(double a0, double b0);

}  // namespace twostrain
