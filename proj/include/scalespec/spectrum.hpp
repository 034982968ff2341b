#pragma once

#include "scalespec/core.hpp"
#include "scalespec/series.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace scalespec {

/// Mean-square Haar detail energies S_j, j = j_first..j_last, over one window.
template <typename Scalar>
struct ScaleSpectrumT {
    Index j_first = 0;
    Index j_last = 0;
    Vector<Scalar> s;       // s[j - j_first] = S_j
    std::vector<Index> counts;  // N_j
    Index effective_window = 0;
    Index center = 0;

    Index size() const noexcept { return s.size(); }
    Scalar at_scale(Index j) const { return s[j - j_first]; }
};

using ScaleSpectrum = ScaleSpectrumT<double>;

struct CrossSpectrum {
    Index j_first = 0;
    Index j_last = 0;
    std::vector<std::optional<double>> rho;  // empty where undefined
};

/// Continuous-transform Haar detail coefficients at scale j:
///   d_j(i) = sum_{k=0}^{j-1} (q_{k+i} - q_{k+i+j}) / sqrt(2j),  i = 1..M-2j+1.
/// Computed from prefix sums of the window re-based at its first sample, so a
/// constant offset in q cancels before any rounding.
template <typename Derived>
Vector<typename Derived::Scalar> haar_details(const Eigen::MatrixBase<Derived>& q, Index j) {
    using Scalar = typename Derived::Scalar;
    const Index M = q.size();
    if (j < 1 || j > M / 2) {
        throw std::invalid_argument("scale j=" + std::to_string(j) + " outside 1.." + std::to_string(M / 2));
    }
    Vector<Scalar> prefix(M + 1);
    prefix[0] = Scalar(0);
    const Scalar base = q[0];
    for (Index m = 0; m < M; ++m) {
        prefix[m + 1] = prefix[m] + (q[m] - base);
    }
    const Index count = M - 2 * j + 1;
    using std::sqrt;
    const Scalar norm = sqrt(Scalar(2 * j));
    Vector<Scalar> d(count);
    for (Index i = 0; i < count; ++i) {
        const Scalar left = prefix[i + j] - prefix[i];
        const Scalar right = prefix[i + 2 * j] - prefix[i + j];
        d[i] = (left - right) / norm;
    }
    return d;
}

template <typename Derived>
ScaleSpectrumT<typename Derived::Scalar> scale_spectrum(const Eigen::MatrixBase<Derived>& q, Index j_first,
                                                        Index j_last) {
    using Scalar = typename Derived::Scalar;
    const Index M = q.size();
    if (j_first < 1 || j_last < j_first || j_last > M / 2) {
        throw std::invalid_argument("invalid scale range [" + std::to_string(j_first) + ", " +
                                    std::to_string(j_last) + "] for window of length " + std::to_string(M));
    }
    ScaleSpectrumT<Scalar> out;
    out.j_first = j_first;
    out.j_last = j_last;
    out.effective_window = M;
    out.s.resize(j_last - j_first + 1);
    out.counts.reserve(static_cast<std::size_t>(j_last - j_first + 1));
    for (Index j = j_first; j <= j_last; ++j) {
        const auto d = haar_details(q, j);
        out.s[j - j_first] = d.squaredNorm() / Scalar(d.size());
        out.counts.push_back(d.size());
    }
    return out;
}

ScaleSpectrum scale_spectrum(const AnalysisWindow& window, Index j_first, Index j_last);

/// Pearson correlation of paired detail coefficients at each scale.
CrossSpectrum cross_scale_correlation(const VectorXd& a, const VectorXd& b, Index j_first, Index j_last);
CrossSpectrum cross_scale_correlation(const AnalysisWindow& a, const AnalysisWindow& b, Index j_first,
                                      Index j_last);

}  // namespace scalespec
