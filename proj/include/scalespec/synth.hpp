#pragma once

#include "scalespec/core.hpp"
#include "scalespec/series.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace scalespec {

/// Synthesis recipe for fBm / mBm oracles. Paths hold one value per sample.
struct GaussianProcessSpec {
    VectorXd h_path;
    VectorXd sigma_path;
    Index n = 0;
    std::uint64_t seed = 0;

    static GaussianProcessSpec constant(double h, double sigma, Index n, std::uint64_t seed);
    bool is_constant() const;
    void validate() const;
};

/// Covariance at integer lag k of the unit-step increments of fBm.
template <typename Scalar>
Scalar fgn_covariance(Scalar H, Scalar sigma, Index k) {
    require(H > Scalar(0) && H < Scalar(1), "Hurst exponent must lie in (0, 1)");
    require(sigma > Scalar(0), "sigma must be positive");
    require(k >= 0, "lag must be non-negative");
    using std::abs;
    using std::pow;
    const Scalar two_h = Scalar(2) * H;
    const Scalar kk = static_cast<Scalar>(k);
    const Scalar g = pow(abs(kk + 1), two_h) - Scalar(2) * pow(kk, two_h) + pow(abs(kk - 1), two_h);
    return sigma * sigma * g / Scalar(2);
}

/// Autocovariance vector gamma(0..n-1) of fGn.
VectorXd fgn_autocovariance(double H, double sigma, Index n);

/// C(h) = pi / (h Gamma(2h) sin(pi h)), the normalization of the harmonizable
/// representation.
template <typename Scalar>
Scalar c_normalization(Scalar h) {
    require(h > Scalar(0) && h < Scalar(1), "h must lie in (0, 1)");
    using std::sin;
    using std::tgamma;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return pi / (h * tgamma(Scalar(2) * h) * sin(pi * h));
}

/// Exact fractional Gaussian noise of length n by circulant embedding, with a
/// dense Cholesky fallback when the embedding is not non-negative.
VectorXd synth_fgn(double H, double sigma, Index n, std::uint64_t seed);

/// fBm path of length spec.n with B(0) = 0. Kind is log_price.
SampledSeries synth_fbm(const GaussianProcessSpec& spec);

struct MbmGrid {
    Index frequencies = Index(1) << 16;  // K, points on the symmetric grid
    double cutoff = 0.0;                 // Xi; 0 selects pi * n
};

/// Approximate multifractional Brownian motion from a discretized harmonizable
/// integral. One draw of the complex measure is shared by all times. The grid
/// is geometric in |xi| so both the low-frequency and the near-cutoff parts of
/// the integrand are resolved.
SampledSeries synth_mbm(const GaussianProcessSpec& spec, const MbmGrid& grid = {});

SampledSeries add_white_noise(const SampledSeries& series, double noise_std, std::uint64_t seed);

}  // namespace scalespec
