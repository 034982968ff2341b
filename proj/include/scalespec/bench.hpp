#pragma once

#include "scalespec/core.hpp"
#include "scalespec/fit.hpp"
#include "scalespec/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scalespec {

/// Exact first and second moments of the scale spectrum of a window of M
/// samples of unit-volatility fBm with Hurst exponent H.
struct SpectrumMoments {
    VectorXd mean;        // E[S_j]
    MatrixXd covariance;  // Cov(S_j, S_k)
};

SpectrumMoments fgn_spectrum_moments(double H, Index M, Index j_first, Index j_last);

/// Delta-method covariance of log2 S_j.
MatrixXd fgn_log_spectrum_covariance(double H, Index M, Index j_first, Index j_last);

/// Scale-spectral GLS using the fBm-implied covariance of the log spectrum,
/// evaluated at the current Hurst estimate (started from the linear-weight
/// fit and refined for a fixed number of passes).
PowerLawFit full_covariance_fit(const ScaleSpectrum& spectrum, int passes = 2);

struct BenchConfig {
    std::vector<double> hurst{0.8};
    double noise = 0.0;       // white-noise std relative to the increment std
    Index n = 256;
    Index replicas = 200;
    std::uint64_t seed = 1;
    double sigma = 1.0;
    Index j_first = 1;
    std::optional<Index> j_last;
    bool full_covariance = true;

    void validate() const;
};

struct EstimatorSummary {
    double hurst = 0.0;
    double noise = 0.0;
    std::string estimator;
    Index replicas = 0;   // successful replicas
    double mean_h = 0.0;
    double std_h = 0.0;
    double bias = 0.0;
};

struct ResidualRatio {
    double hurst = 0.0;
    double noise = 0.0;
    Index scale_in_steps = 0;
    double ratio = 0.0;   // mean squared residual, robust over ML
};

struct BenchResult {
    std::vector<EstimatorSummary> rows;
    std::vector<ResidualRatio> residual_ratios;

    const EstimatorSummary& find(double hurst, double noise, const std::string& estimator) const;
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Monte Carlo comparison of the robust, linear-weight, full-covariance and
/// ML estimators on clean and (when noise > 0) noise-corrupted fBm.
BenchResult bench_estimators(const BenchConfig& config);

}  // namespace scalespec
