#include "scalespec/fit.hpp"

#include <string>

namespace scalespec {

namespace {

VectorXd log2_spectrum(const ScaleSpectrum& spectrum) {
    if (spectrum.size() == 0) {
        throw std::invalid_argument("empty spectrum");
    }
    for (Index k = 0; k < spectrum.size(); ++k) {
        const double s = spectrum.s[k];
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw ComputationError("degenerate spectrum: S_" + std::to_string(spectrum.j_first + k) +
                                   " is not positive");
        }
    }
    return spectrum.s.array().log2().matrix();
}

void finish(PowerLawFit& fit, const ScaleSpectrum& spectrum) {
    fit.j_first = spectrum.j_first;
    fit.j_last = spectrum.j_last;
    if (fit.branch != FitBranch::fixed_h) {
        fit.h_hat = clamp_hurst((fit.p_hat - 1.0) / 2.0);
    }
    fit.sigma_step = std::exp2(fit.c_hat / 2.0) / std::sqrt(h_scaling(fit.h_hat));
    fit.misfit = spectral_misfit(spectrum, fit);
}

}  // namespace

std::string_view to_string(FitBranch branch) {
    switch (branch) {
        case FitBranch::linear_weight: return "linear_weight";
        case FitBranch::cubic_weight: return "cubic_weight";
        case FitBranch::fixed_h: return "fixed_h";
        case FitBranch::full_covariance: return "full_covariance";
        case FitBranch::ml: return "ml";
    }
    return "unknown";
}

VectorXd log2_scales(Index j_first, Index j_last) {
    VectorXd x(j_last - j_first + 1);
    for (Index j = j_first; j <= j_last; ++j) {
        x[j - j_first] = std::log2(2.0 * static_cast<double>(j));
    }
    return x;
}

PowerLawFit gls_fit(const ScaleSpectrum& spectrum, int weight_exponent) {
    require(weight_exponent == 1 || weight_exponent == 3, "weight exponent must be 1 or 3");
    if (spectrum.j_last <= spectrum.j_first) {
        throw ComputationError("singular normal equations: need at least two scales");
    }
    const VectorXd y = log2_spectrum(spectrum);
    const VectorXd x = log2_scales(spectrum.j_first, spectrum.j_last);

    // R^{-1} is diagonal with entries j^{-q}.
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (Index k = 0; k < y.size(); ++k) {
        const double j = static_cast<double>(spectrum.j_first + k);
        const double w = std::pow(j, -weight_exponent);
        sw += w;
        sx += w * x[k];
        sy += w * y[k];
        sxx += w * x[k] * x[k];
        sxy += w * x[k] * y[k];
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) {
        throw ComputationError("singular normal equations");
    }
    PowerLawFit fit;
    fit.p_hat = (sw * sxy - sx * sy) / det;
    fit.c_hat = (sy - fit.p_hat * sx) / sw;
    fit.branch = weight_exponent == 1 ? FitBranch::linear_weight : FitBranch::cubic_weight;
    finish(fit, spectrum);
    return fit;
}

PowerLawFit gls_fit(const ScaleSpectrum& spectrum, const MatrixXd& log_spectrum_covariance) {
    const Index n = spectrum.size();
    require(log_spectrum_covariance.rows() == n && log_spectrum_covariance.cols() == n,
            "covariance size does not match the scale range");
    if (n < 2) {
        throw ComputationError("singular normal equations: need at least two scales");
    }
    const VectorXd y = log2_spectrum(spectrum);
    MatrixXd X(n, 2);
    X.col(0).setOnes();
    X.col(1) = log2_scales(spectrum.j_first, spectrum.j_last);

    Eigen::LDLT<MatrixXd> ldlt(log_spectrum_covariance);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw ComputationError("log-spectrum covariance is not positive definite");
    }
    const MatrixXd cinv_x = ldlt.solve(X);
    const Eigen::Matrix2d normal = X.transpose() * cinv_x;
    const Eigen::Vector2d rhs = cinv_x.transpose() * y;
    const Eigen::Vector2d b = normal.ldlt().solve(rhs);
    if (!b.allFinite()) {
        throw ComputationError("singular normal equations");
    }
    PowerLawFit fit;
    fit.c_hat = b[0];
    fit.p_hat = b[1];
    fit.branch = FitBranch::full_covariance;
    finish(fit, spectrum);
    return fit;
}

PowerLawFit robust_fit(const ScaleSpectrum& spectrum) {
    const PowerLawFit linear = gls_fit(spectrum, 1);
    const PowerLawFit cubic = gls_fit(spectrum, 3);
    // Differences at rounding level count as ties.
    return cubic.h_hat > linear.h_hat + 1e-12 ? cubic : linear;
}

PowerLawFit fixed_h_fit(const ScaleSpectrum& spectrum, double h0) {
    require(h0 > 0.0 && h0 < 1.0, "H0 must lie in (0, 1)");
    if (spectrum.j_last <= spectrum.j_first) {
        throw ComputationError("singular normal equations: need at least two scales");
    }
    const VectorXd y = log2_spectrum(spectrum);
    const VectorXd x = log2_scales(spectrum.j_first, spectrum.j_last);
    const double p0 = 2.0 * h0 + 1.0;
    double sw = 0.0;
    double swr = 0.0;
    for (Index k = 0; k < y.size(); ++k) {
        const double w = 1.0 / static_cast<double>(spectrum.j_first + k);
        sw += w;
        swr += w * (y[k] - p0 * x[k]);
    }
    PowerLawFit fit;
    fit.c_hat = swr / sw;
    fit.p_hat = p0;
    fit.h_hat = h0;
    fit.branch = FitBranch::fixed_h;
    finish(fit, spectrum);
    return fit;
}

PowerLawFit line_from_parameters(double H, double sigma_step, Index j_first, Index j_last, FitBranch branch) {
    require(sigma_step > 0.0, "sigma must be positive");
    PowerLawFit fit;
    fit.h_hat = H;
    fit.sigma_step = sigma_step;
    fit.p_hat = 2.0 * H + 1.0;
    fit.c_hat = std::log2(sigma_step * sigma_step * h_scaling(H));
    fit.branch = branch;
    fit.j_first = j_first;
    fit.j_last = j_last;
    return fit;
}

VectorXd per_scale_residual(const ScaleSpectrum& spectrum, const PowerLawFit& fit) {
    if (fit.j_first != spectrum.j_first || fit.j_last != spectrum.j_last) {
        throw std::invalid_argument("fit and spectrum cover different scale ranges");
    }
    const VectorXd y = log2_spectrum(spectrum);
    const VectorXd x = log2_scales(spectrum.j_first, spectrum.j_last);
    return (y.array() - fit.c_hat - fit.p_hat * x.array()).square().matrix();
}

double spectral_misfit(const ScaleSpectrum& spectrum, const PowerLawFit& fit) {
    return std::sqrt(per_scale_residual(spectrum, fit).mean());
}

}  // namespace scalespec
