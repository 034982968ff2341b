#include "scalespec/mle.hpp"

#include "scalespec/fit.hpp"
#include "scalespec/synth.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace scalespec {

ToeplitzInnovations durbin_levinson(std::span<const double> r, std::span<const double> x) {
    const std::size_t n = x.size();
    require(r.size() >= n && n >= 1, "autocovariance shorter than the data");
    if (!(r[0] > 0.0)) {
        throw ComputationError("covariance is not positive definite");
    }
    std::vector<double> phi(n, 0.0);   // phi[1..k]
    std::vector<double> prev(n, 0.0);
    double v = r[0];
    ToeplitzInnovations out;
    out.log_det = std::log(v);
    out.quadratic_form = x[0] * x[0] / v;
    for (std::size_t k = 1; k < n; ++k) {
        double acc = r[k];
        for (std::size_t j = 1; j < k; ++j) {
            acc -= phi[j] * r[k - j];
        }
        const double kappa = acc / v;
        std::copy(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(k), prev.begin());
        for (std::size_t j = 1; j < k; ++j) {
            phi[j] = prev[j] - kappa * prev[k - j];
        }
        phi[k] = kappa;
        v *= (1.0 - kappa) * (1.0 + kappa);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ComputationError("covariance is not numerically positive definite");
        }
        double e = x[k];
        for (std::size_t j = 1; j <= k; ++j) {
            e -= phi[j] * x[k - j];
        }
        out.log_det += std::log(v);
        out.quadratic_form += e * e / v;
    }
    return out;
}

NegLogLik fgn_negloglik(std::span<const double> x, double H) {
    require(H > 0.0 && H < 1.0, "Hurst exponent must lie in (0, 1)");
    require(x.size() >= 8, "likelihood needs at least 8 increments");
    const auto n = static_cast<Index>(x.size());
    const VectorXd gamma = fgn_autocovariance(H, 1.0, n);
    const auto inn = durbin_levinson(std::span<const double>(gamma.data(), x.size()), x);
    const double nd = static_cast<double>(n);
    const double sigma2 = inn.quadratic_form / nd;
    NegLogLik out;
    out.sigma_step = std::sqrt(sigma2);
    out.value = 0.5 * nd * std::log(sigma2) + 0.5 * inn.log_det + 0.5 * nd * (std::log(2.0 * std::numbers::pi) + 1.0);
    return out;
}

NegLogLik fgn_negloglik(const VectorXd& x, double H) {
    return fgn_negloglik(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), H);
}

double fgn_negloglik(std::span<const double> x, double H, double sigma) {
    require(H > 0.0 && H < 1.0, "Hurst exponent must lie in (0, 1)");
    require(sigma > 0.0, "sigma must be positive");
    require(x.size() >= 8, "likelihood needs at least 8 increments");
    const auto n = static_cast<Index>(x.size());
    const VectorXd gamma = fgn_autocovariance(H, 1.0, n);
    const auto inn = durbin_levinson(std::span<const double>(gamma.data(), x.size()), x);
    const double nd = static_cast<double>(n);
    const double s2 = sigma * sigma;
    return 0.5 * nd * std::log(2.0 * std::numbers::pi * s2) + 0.5 * inn.log_det + 0.5 * inn.quadratic_form / s2;
}

MLFit ml_fit(const VectorXd& q) {
    require(q.size() >= 16, "ML fit needs a window of at least 16 samples");
    const Index n = q.size() - 1;
    const VectorXd x = q.tail(n) - q.head(n);
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));

    auto objective = [&](double H) {
        const double v = fgn_negloglik(xs, H).value;
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    constexpr int kGrid = 21;
    const double step = (kHurstMax - kHurstMin) / (kGrid - 1);
    int best = -1;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        const double v = objective(kHurstMin + step * i);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best < 0) {
        throw ComputationError("likelihood is not finite anywhere on the search grid");
    }

    double lo = kHurstMin + step * std::max(best - 1, 0);
    double hi = kHurstMin + step * std::min(best + 1, kGrid - 1);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = objective(a);
    double fb = objective(b);
    while (hi - lo > 1e-4) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = objective(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = objective(b);
        }
    }
    double h = 0.5 * (lo + hi);
    double value = objective(h);
    if (best_value < value) {
        h = kHurstMin + step * best;
        value = best_value;
    }
    const auto at = fgn_negloglik(xs, h);
    return {h, at.sigma_step, -value};
}

}  // namespace scalespec
