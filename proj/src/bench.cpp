#include "scalespec/bench.hpp"

#include "scalespec/mle.hpp"
#include "scalespec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scalespec {

namespace {

// Tent filter sums over a function sampled on [lo, lo + size): both
// directions are boxcar(k) * boxcar(k), evaluated with two prefix passes.
class OffsetArray {
public:
    OffsetArray(Index lo, Index hi) : lo_(lo), data_(static_cast<std::size_t>(hi - lo + 1), 0.0) {}
    double& operator()(Index i) { return data_[static_cast<std::size_t>(i - lo_)]; }
    double operator()(Index i) const { return data_[static_cast<std::size_t>(i - lo_)]; }
    Index lo() const { return lo_; }
    Index hi() const { return lo_ + static_cast<Index>(data_.size()) - 1; }

private:
    Index lo_;
    std::vector<double> data_;
};

// out(t) = sum_{b=0}^{k-1} f(t + b) for t in [lo, hi - k + 1]
OffsetArray forward_box(const OffsetArray& f, Index k) {
    OffsetArray prefix(f.lo(), f.hi() + 1);
    prefix(f.lo()) = 0.0;
    for (Index t = f.lo(); t <= f.hi(); ++t) {
        prefix(t + 1) = prefix(t) + f(t);
    }
    OffsetArray out(f.lo(), f.hi() - k + 1);
    for (Index t = out.lo(); t <= out.hi(); ++t) {
        out(t) = prefix(t + k) - prefix(t);
    }
    return out;
}

// out(t) = sum_{b=0}^{k-1} f(t - b) for t in [lo + k - 1, hi]
OffsetArray backward_box(const OffsetArray& f, Index k) {
    OffsetArray prefix(f.lo(), f.hi() + 1);
    prefix(f.lo()) = 0.0;
    for (Index t = f.lo(); t <= f.hi(); ++t) {
        prefix(t + 1) = prefix(t) + f(t);
    }
    OffsetArray out(f.lo() + k - 1, f.hi());
    for (Index t = out.lo(); t <= out.hi(); ++t) {
        out(t) = prefix(t + 1) - prefix(t - k + 1);
    }
    return out;
}

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) {
        return 0.0;
    }
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

SpectrumMoments fgn_spectrum_moments(double H, Index M, Index j_first, Index j_last) {
    require(M >= 4, "window length must be at least 4");
    require(j_first >= 1 && j_last >= j_first && j_last <= M / 2, "invalid scale range");
    const Index n = M - 1;  // increments
    const Index J = j_last - j_first + 1;

    // gamma over lags [-(3n), 3n]
    OffsetArray gamma(-3 * n, 3 * n);
    for (Index lag = 0; lag <= 3 * n; ++lag) {
        const double g = fgn_covariance(H, 1.0, lag);
        gamma(lag) = g;
        gamma(-lag) = g;
    }

    SpectrumMoments out;
    out.mean.resize(J);
    out.covariance.resize(J, J);

    for (Index j = j_first; j <= j_last; ++j) {
        const Index nj = M - 2 * j + 1;
        // G_j(s) = sum_u T_j(u) gamma(s - u), T_j = boxcar(j) * boxcar(j).
        const OffsetArray g_j = backward_box(backward_box(gamma, j), j);
        for (Index k = j; k <= j_last; ++k) {
            const Index nk = M - 2 * k + 1;
            // C(m) = sum_v T_k(v) G_j(m + v), m in [1 - nj, nk - 1].
            const OffsetArray c = forward_box(forward_box(g_j, k), k);
            const double norm = 1.0 / (2.0 * std::sqrt(static_cast<double>(j * k)));
            double acc = 0.0;
            for (Index m = 1 - nj; m <= nk - 1; ++m) {
                const Index count = std::min(nj, nk - m) - std::max<Index>(1, 1 - m) + 1;
                if (count <= 0) {
                    continue;
                }
                const double cov = c(m) * norm;
                acc += static_cast<double>(count) * cov * cov;
            }
            const double value = 2.0 * acc / static_cast<double>(nj * nk);
            out.covariance(j - j_first, k - j_first) = value;
            out.covariance(k - j_first, j - j_first) = value;
            if (k == j) {
                out.mean[j - j_first] = c(0) * norm;
            }
        }
    }
    return out;
}

MatrixXd fgn_log_spectrum_covariance(double H, Index M, Index j_first, Index j_last) {
    const auto moments = fgn_spectrum_moments(H, M, j_first, j_last);
    const double ln2 = std::numbers::ln2;
    const Eigen::ArrayXd scale = 1.0 / (moments.mean.array() * ln2);
    MatrixXd cov = moments.covariance;
    cov.array().colwise() *= scale;
    cov.array().rowwise() *= scale.transpose();
    return cov;
}

PowerLawFit full_covariance_fit(const ScaleSpectrum& spectrum, int passes) {
    require(passes >= 1, "at least one pass required");
    double h = gls_fit(spectrum, 1).h_hat;
    PowerLawFit fit;
    for (int pass = 0; pass < passes; ++pass) {
        const MatrixXd cov =
            fgn_log_spectrum_covariance(h, spectrum.effective_window, spectrum.j_first, spectrum.j_last);
        fit = gls_fit(spectrum, cov);
        h = fit.h_hat;
    }
    return fit;
}

void BenchConfig::validate() const {
    require(!hurst.empty(), "at least one Hurst value required");
    for (double h : hurst) {
        require(h > 0.0 && h < 1.0, "Hurst values must lie in (0, 1)");
    }
    require(noise >= 0.0, "noise must be non-negative");
    require(n >= 16, "n must be at least 16");
    require(replicas >= 10, "at least 10 replicas required");
    require(sigma > 0.0, "sigma must be positive");
    const Index je = j_last.value_or(n / 2);
    require(j_first >= 1 && je > j_first && je <= n / 2, "invalid scale range");
}

const EstimatorSummary& BenchResult::find(double hurst, double noise, const std::string& estimator) const {
    for (const auto& row : rows) {
        if (row.hurst == hurst && row.noise == noise && row.estimator == estimator) {
            return row;
        }
    }
    throw std::out_of_range("no bench row for estimator " + estimator);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(mix(base) ^ a) ^ b) ^ c);
}

BenchResult bench_estimators(const BenchConfig& config) {
    config.validate();
    const Index j_last = config.j_last.value_or(config.n / 2);
    const Index J = j_last - config.j_first + 1;

    std::vector<double> noise_levels{0.0};
    if (config.noise > 0.0) {
        noise_levels.push_back(config.noise);
    }
    std::vector<std::string> names{"robust", "linear_weight"};
    if (config.full_covariance) {
        names.emplace_back("full_covariance");
    }
    names.emplace_back("ml");

    BenchResult result;
    for (std::size_t hi = 0; hi < config.hurst.size(); ++hi) {
        const double H = config.hurst[hi];
        for (std::size_t ni = 0; ni < noise_levels.size(); ++ni) {
            const double noise = noise_levels[ni];
            std::vector<std::vector<double>> estimates(names.size());
            VectorXd res_robust = VectorXd::Zero(J);
            VectorXd res_ml = VectorXd::Zero(J);
            Index residual_count = 0;

            for (Index r = 0; r < config.replicas; ++r) {
                const auto path_seed = derive_seed(config.seed, hi, static_cast<std::uint64_t>(r), 0);
                auto path = synth_fbm(GaussianProcessSpec::constant(H, config.sigma, config.n, path_seed));
                if (noise > 0.0) {
                    path = add_white_noise(path, noise * config.sigma,
                                           derive_seed(config.seed, hi, static_cast<std::uint64_t>(r), 1 + ni));
                }
                const VectorXd& q = path.values();
                ScaleSpectrum spectrum;
                try {
                    spectrum = scale_spectrum(q, config.j_first, j_last);
                } catch (const std::exception&) {
                    continue;
                }

                std::optional<PowerLawFit> robust;
                std::size_t slot = 0;
                auto record = [&](auto&& estimate) {
                    try {
                        estimates[slot].push_back(estimate());
                    } catch (const ComputationError&) {
                    }
                    ++slot;
                };
                record([&] {
                    robust = robust_fit(spectrum);
                    return robust->h_hat;
                });
                record([&] { return gls_fit(spectrum, 1).h_hat; });
                if (config.full_covariance) {
                    record([&] { return full_covariance_fit(spectrum).h_hat; });
                }
                std::optional<MLFit> ml;
                record([&] {
                    ml = ml_fit(q);
                    return ml->h_hat;
                });

                if (robust && ml && ml->sigma_step > 0.0) {
                    const auto ml_line =
                        line_from_parameters(ml->h_hat, ml->sigma_step, config.j_first, j_last, FitBranch::ml);
                    res_robust += per_scale_residual(spectrum, *robust);
                    res_ml += per_scale_residual(spectrum, ml_line);
                    ++residual_count;
                }
            }

            for (std::size_t e = 0; e < names.size(); ++e) {
                const auto& v = estimates[e];
                EstimatorSummary row;
                row.hurst = H;
                row.noise = noise;
                row.estimator = names[e];
                row.replicas = static_cast<Index>(v.size());
                if (!v.empty()) {
                    double sum = 0.0;
                    for (double x : v) {
                        sum += x;
                    }
                    row.mean_h = sum / static_cast<double>(v.size());
                    row.std_h = sample_std(v, row.mean_h);
                    row.bias = row.mean_h - H;
                }
                result.rows.push_back(row);
            }
            if (residual_count > 0) {
                for (Index k = 0; k < J; ++k) {
                    ResidualRatio rr;
                    rr.hurst = H;
                    rr.noise = noise;
                    rr.scale_in_steps = 2 * (config.j_first + k);
                    rr.ratio = res_ml[k] > 0.0 ? res_robust[k] / res_ml[k] : std::numeric_limits<double>::quiet_NaN();
                    result.residual_ratios.push_back(rr);
                }
            }
        }
    }
    return result;
}

}  // namespace scalespec
