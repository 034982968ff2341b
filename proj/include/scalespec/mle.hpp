#pragma once

#include "scalespec/core.hpp"

#include <span>

namespace scalespec {

struct NegLogLik {
    double value = 0.0;           // at the profiled sigma
    double sigma_step = 0.0;      // profiled sigma
};

struct MLFit {
    double h_hat = 0.0;
    double sigma_step = 0.0;
    double log_likelihood = 0.0;
};

/// Innovations of a stationary Gaussian sequence via the Durbin-Levinson
/// recursion on its autocovariance. O(n^2) time, O(n) memory.
struct ToeplitzInnovations {
    double log_det = 0.0;         // log det of the covariance
    double quadratic_form = 0.0;  // x^T Gamma^{-1} x
};

ToeplitzInnovations durbin_levinson(std::span<const double> autocovariance, std::span<const double> x);

/// Gaussian negative log-likelihood of zero-mean fGn increments at Hurst
/// exponent H with sigma profiled out analytically.
NegLogLik fgn_negloglik(std::span<const double> x, double H);
NegLogLik fgn_negloglik(const VectorXd& x, double H);

/// Full negative log-likelihood at an explicit sigma.
double fgn_negloglik(std::span<const double> x, double H, double sigma);

/// ML estimate of (H, sigma) from a window of log prices (first differences
/// are the data). Coarse 21-point grid on [0.05, 0.95], then golden-section
/// refinement to |dH| < 1e-4.
MLFit ml_fit(const VectorXd& q);

}  // namespace scalespec
