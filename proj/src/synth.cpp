#include "scalespec/synth.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <random>
#include <vector>

namespace scalespec {

namespace {

// Largest size for which the dense Cholesky fallback is attempted.
constexpr Index kDenseFallbackLimit = 8192;

VectorXd dense_fgn(const VectorXd& gamma, std::mt19937_64& rng) {
    const Index n = gamma.size();
    if (n > kDenseFallbackLimit) {
        throw ComputationError("circulant embedding failed and n is too large for dense factorization");
    }
    MatrixXd cov(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            cov(i, j) = gamma[std::abs(i - j)];
        }
    }
    Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw ComputationError("fGn covariance is not numerically positive definite");
    }
    std::normal_distribution<double> normal;
    VectorXd z(n);
    for (Index i = 0; i < n; ++i) {
        z[i] = normal(rng);
    }
    return llt.matrixL() * z;
}

}  // namespace

GaussianProcessSpec GaussianProcessSpec::constant(double h, double sigma, Index n, std::uint64_t seed) {
    return {VectorXd::Constant(n, h), VectorXd::Constant(n, sigma), n, seed};
}

bool GaussianProcessSpec::is_constant() const {
    if (h_path.size() == 0 || sigma_path.size() == 0) {
        return false;
    }
    return (h_path.array() == h_path[0]).all() && (sigma_path.array() == sigma_path[0]).all();
}

void GaussianProcessSpec::validate() const {
    require(n >= 2, "process length must be at least 2");
    require(h_path.size() == n && sigma_path.size() == n, "parameter paths must have length n");
    require((h_path.array() > 0.0).all() && (h_path.array() < 1.0).all(),
            "Hurst path must lie in (0, 1)");
    require((sigma_path.array() >= 0.0).all() && sigma_path.allFinite(),
            "volatility path must be non-negative and finite");
}

VectorXd fgn_autocovariance(double H, double sigma, Index n) {
    VectorXd gamma(n);
    for (Index k = 0; k < n; ++k) {
        gamma[k] = fgn_covariance(H, sigma, k);
    }
    return gamma;
}

VectorXd synth_fgn(double H, double sigma, Index n, std::uint64_t seed) {
    require(n >= 1, "fGn length must be positive");
    const VectorXd gamma = fgn_autocovariance(H, sigma, n);
    std::mt19937_64 rng(seed);
    if (n == 1) {
        std::normal_distribution<double> normal;
        return VectorXd::Constant(1, sigma * normal(rng));
    }

    Index m = 2;
    while (m < 2 * (n - 1)) {
        m *= 2;
    }
    std::vector<std::complex<double>> row(static_cast<std::size_t>(m));
    for (Index k = 0; k <= m / 2; ++k) {
        const double g = k < n ? gamma[k] : fgn_covariance(H, sigma, k);
        row[static_cast<std::size_t>(k)] = g;
        if (k > 0 && k < m / 2) {
            row[static_cast<std::size_t>(m - k)] = g;
        }
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> eig;
    fft.fwd(eig, row);

    double max_eig = 0.0;
    for (const auto& e : eig) {
        max_eig = std::max(max_eig, e.real());
    }
    bool nonnegative = true;
    for (const auto& e : eig) {
        if (e.real() < -1e-10 * max_eig) {
            nonnegative = false;
            break;
        }
    }
    if (!nonnegative) {
        return dense_fgn(gamma, rng);
    }

    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> weighted(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) {
        const double lambda = std::max(eig[static_cast<std::size_t>(k)].real(), 0.0);
        const double scale = std::sqrt(lambda / static_cast<double>(m));
        const double re = normal(rng);
        const double im = normal(rng);
        weighted[static_cast<std::size_t>(k)] = scale * std::complex<double>(re, im);
    }
    std::vector<std::complex<double>> out;
    fft.fwd(out, weighted);
    VectorXd x(n);
    for (Index t = 0; t < n; ++t) {
        x[t] = out[static_cast<std::size_t>(t)].real();
    }
    return x;
}

SampledSeries synth_fbm(const GaussianProcessSpec& spec) {
    spec.validate();
    require(spec.is_constant(), "synth_fbm requires constant H and sigma paths");
    require(spec.sigma_path[0] > 0.0, "sigma must be positive");
    const VectorXd dx = synth_fgn(spec.h_path[0], spec.sigma_path[0], spec.n - 1, spec.seed);
    VectorXd path(spec.n);
    path[0] = 0.0;
    for (Index t = 1; t < spec.n; ++t) {
        path[t] = path[t - 1] + dx[t - 1];
    }
    return SampledSeries(std::move(path), SeriesKind::log_price);
}

SampledSeries synth_mbm(const GaussianProcessSpec& spec, const MbmGrid& grid) {
    spec.validate();
    const Index n = spec.n;
    const Index K = grid.frequencies;
    require(K >= (Index(1) << 12), "frequency grid must have at least 4096 points");
    require(K % 2 == 0, "frequency grid size must be even");
    if (K < 4 * n) {
        throw std::invalid_argument("frequency grid too small: need at least 4 points per sample");
    }
    const double cutoff = grid.cutoff > 0.0 ? grid.cutoff : std::numbers::pi * static_cast<double>(n);
    require(std::isfinite(cutoff), "frequency cutoff must be finite");

    // Geometric grid on |xi| in [xi_min, cutoff], midpoint rule in log xi.
    const Index half = K / 2;
    const double log_min = std::log(1e-6 / static_cast<double>(n));
    const double log_max = std::log(cutoff);
    require(log_max > log_min, "frequency cutoff too small");
    const double du = (log_max - log_min) / static_cast<double>(half);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal;

    const Eigen::ArrayXd h = spec.h_path.array();
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd cos_t(n);
    Eigen::ArrayXd sin_t(n);
    for (Index k = 0; k < half; ++k) {
        const double u = log_min + (static_cast<double>(k) + 0.5) * du;
        const double xi = std::exp(u);
        // Positive and negative frequency draws of dW1 + i dW2.
        const double re_pos = normal(rng);
        const double im_pos = normal(rng);
        const double re_neg = normal(rng);
        const double im_neg = normal(rng);
        const double a = re_pos + re_neg;
        const double b = im_pos - im_neg;

        const std::complex<double> step(std::cos(xi), std::sin(xi));
        std::complex<double> phase(1.0, 0.0);
        for (Index t = 0; t < n; ++t) {
            if ((t & 255) == 0) {
                const double arg = xi * static_cast<double>(t);
                phase = {std::cos(arg), std::sin(arg)};
            }
            cos_t[t] = phase.real();
            sin_t[t] = phase.imag();
            phase *= step;
        }
        // |xi|^{-1/2-H} sqrt(dxi) = exp(-H u) sqrt(du) on the log grid.
        acc += (-h * u).exp() * ((cos_t - 1.0) * a + sin_t * b);
    }

    VectorXd path(n);
    for (Index t = 0; t < n; ++t) {
        const double s = spec.sigma_path[t];
        path[t] = s == 0.0 ? 0.0 : s / std::sqrt(c_normalization(h[t])) * std::sqrt(du) * acc[t];
    }
    return SampledSeries(std::move(path), SeriesKind::log_price);
}

SampledSeries add_white_noise(const SampledSeries& series, double noise_std, std::uint64_t seed) {
    require(noise_std >= 0.0 && std::isfinite(noise_std), "noise_std must be non-negative");
    if (noise_std == 0.0) {
        return series;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_std);
    VectorXd v = series.values();
    for (Index i = 0; i < v.size(); ++i) {
        v[i] += normal(rng);
    }
    return SampledSeries(std::move(v), series.kind(), series.start_index(), series.dates());
}

}  // namespace scalespec
