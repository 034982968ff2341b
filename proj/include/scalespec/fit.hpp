#pragma once

#include "scalespec/core.hpp"
#include "scalespec/spectrum.hpp"

#include <cmath>
#include <string_view>

namespace scalespec {

inline constexpr double kHurstMin = 0.05;
inline constexpr double kHurstMax = 0.95;
inline constexpr double kDefaultStepsPerYear = 252.0;

enum class FitBranch { linear_weight, cubic_weight, fixed_h, full_covariance, ml };

std::string_view to_string(FitBranch branch);

/// Affine model log2 S_j = c + p log2(2j) over [j_first, j_last] together with
/// the derived Hurst exponent and per-step volatility.
struct PowerLawFit {
    double c_hat = 0.0;
    double p_hat = 0.0;
    double h_hat = 0.0;
    double sigma_step = 0.0;
    double misfit = 0.0;
    FitBranch branch = FitBranch::linear_weight;
    Index j_first = 0;
    Index j_last = 0;
};

/// Scale-spectral scaling function h(H) = (1 - 2^{-2H}) / ((2H+2)(2H+1)).
/// For fBm with unit volatility, E[S_j] ~ h(H) (2j)^{2H+1} at large j.
template <typename Scalar>
Scalar h_scaling(Scalar H) {
    require(H > Scalar(0) && H < Scalar(1), "Hurst exponent must lie in (0, 1)");
    using std::pow;
    return (Scalar(1) - pow(Scalar(2), Scalar(-2) * H)) / ((Scalar(2) * H + Scalar(2)) * (Scalar(2) * H + Scalar(1)));
}

inline double clamp_hurst(double h) { return std::min(std::max(h, kHurstMin), kHurstMax); }

/// log2(2j) for j = j_first..j_last.
VectorXd log2_scales(Index j_first, Index j_last);

/// Generalized least squares with diagonal weight matrix R_jj = j^q.
PowerLawFit gls_fit(const ScaleSpectrum& spectrum, int weight_exponent);

/// GLS against an arbitrary covariance of the log2 spectrum.
PowerLawFit gls_fit(const ScaleSpectrum& spectrum, const MatrixXd& log_spectrum_covariance);

/// Max of the linear- and cubic-weight Hurst estimates; the remaining fields
/// come from the branch attaining the max (ties go to the linear branch).
PowerLawFit robust_fit(const ScaleSpectrum& spectrum);

/// Slope fixed at 2 H0 + 1, intercept by 1/j weighted mean.
PowerLawFit fixed_h_fit(const ScaleSpectrum& spectrum, double h0);

/// Builds the spectral line implied by (H, sigma_step); used to compare the
/// ML estimate against the empirical spectrum.
PowerLawFit line_from_parameters(double H, double sigma_step, Index j_first, Index j_last, FitBranch branch);

double spectral_misfit(const ScaleSpectrum& spectrum, const PowerLawFit& fit);

/// Squared log2 residual per scale.
VectorXd per_scale_residual(const ScaleSpectrum& spectrum, const PowerLawFit& fit);

inline double annualize(double sigma_step, double H, double steps_per_year = kDefaultStepsPerYear) {
    require(steps_per_year >= 1.0, "steps_per_year must be at least 1");
    return sigma_step * std::pow(steps_per_year, H);
}

inline double deannualize(double sigma_annual, double H, double steps_per_year = kDefaultStepsPerYear) {
    require(steps_per_year >= 1.0, "steps_per_year must be at least 1");
    return sigma_annual * std::pow(steps_per_year, -H);
}

}  // namespace scalespec
