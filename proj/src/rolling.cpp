#include "scalespec/rolling.hpp"

#include "scalespec/spectrum.hpp"

#include <limits>

namespace scalespec {

void RollingConfig::validate() const {
    require(window >= 4, "window length M must be at least 4");
    require(j_first >= 1, "j_first must be at least 1");
    const Index je = resolved_j_last();
    require(je > j_first && je <= window / 2, "scale range must satisfy 1 <= j_i < j_e <= floor(M/2)");
    require(steps_per_year >= 1.0, "steps_per_year must be at least 1");
    if (mode == TrackMode::fixed_h) {
        require(h0 > 0.0 && h0 < 1.0, "H0 must lie in (0, 1)");
    }
}

ParameterTrack rolling_estimates(const VectorXd& q, const RollingConfig& config) {
    config.validate();
    const Index N = q.size();
    require(N >= config.window, "series shorter than the window length");
    require(q.allFinite(), "series contains non-finite values");

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ParameterTrack track;
    track.config = config;
    track.centers.resize(static_cast<std::size_t>(N));
    track.h = VectorXd::Constant(N, nan);
    track.sigma_step = VectorXd::Constant(N, nan);
    track.sigma_annual = VectorXd::Constant(N, nan);
    track.misfit = VectorXd::Constant(N, nan);
    track.missing.assign(static_cast<std::size_t>(N), true);

    const Index j_last = config.resolved_j_last();
    for (Index n0 = 1; n0 <= N; ++n0) {
        track.centers[static_cast<std::size_t>(n0 - 1)] = n0;
        const AnalysisWindow w = window_slice(q, n0, config.window);
        const Index je = std::min(j_last, w.effective() / 2);
        if (je <= config.j_first) {
            continue;
        }
        const ScaleSpectrum spectrum = scale_spectrum(w, config.j_first, je);
        if (!(spectrum.s.array() > 0.0).all()) {
            continue;
        }
        const PowerLawFit fit =
            config.mode == TrackMode::robust ? robust_fit(spectrum) : fixed_h_fit(spectrum, config.h0);
        const auto k = n0 - 1;
        track.h[k] = fit.h_hat;
        track.sigma_step[k] = fit.sigma_step;
        track.sigma_annual[k] = annualize(fit.sigma_step, fit.h_hat, config.steps_per_year);
        track.misfit[k] = fit.misfit;
        track.missing[static_cast<std::size_t>(k)] = false;
    }
    return track;
}

ParameterTrack rolling_estimates(const SampledSeries& log_prices, const RollingConfig& config) {
    require(log_prices.kind() == SeriesKind::log_price, "rolling estimates expect a log-price series");
    return rolling_estimates(log_prices.values(), config);
}

Variogram variogram(std::span<const double> z, Index max_lag) {
    const auto n = static_cast<Index>(z.size());
    require(max_lag >= 1, "max lag must be at least 1");
    if (max_lag >= n) {
        throw std::invalid_argument("max lag must be smaller than the series length");
    }
    Variogram out;
    out.gamma.resize(max_lag);
    for (Index lag = 1; lag <= max_lag; ++lag) {
        double sum = 0.0;
        Index pairs = 0;
        for (Index i = 0; i + lag < n; ++i) {
            const double a = z[static_cast<std::size_t>(i)];
            const double b = z[static_cast<std::size_t>(i + lag)];
            if (std::isnan(a) || std::isnan(b)) {
                continue;
            }
            sum += (b - a) * (b - a);
            ++pairs;
        }
        out.lags.push_back(lag);
        out.pairs.push_back(pairs);
        out.gamma[lag - 1] = pairs > 0 ? sum / (2.0 * static_cast<double>(pairs))
                                       : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

Variogram variogram(const VectorXd& z, Index max_lag) {
    return variogram(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), max_lag);
}

}  // namespace scalespec
