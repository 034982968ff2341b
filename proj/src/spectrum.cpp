#include "scalespec/spectrum.hpp"

#include <algorithm>

namespace scalespec {

ScaleSpectrum scale_spectrum(const AnalysisWindow& window, Index j_first, Index j_last) {
    auto spec = scale_spectrum(window.q, j_first, j_last);
    spec.center = window.center;
    return spec;
}

CrossSpectrum cross_scale_correlation(const VectorXd& a, const VectorXd& b, Index j_first, Index j_last) {
    require(a.size() == b.size(), "cross-correlation needs windows of equal length");
    require(j_first >= 1 && j_last >= j_first && j_last <= a.size() / 2, "invalid scale range");
    CrossSpectrum out;
    out.j_first = j_first;
    out.j_last = j_last;
    for (Index j = j_first; j <= j_last; ++j) {
        const VectorXd da = haar_details(a, j);
        const VectorXd db = haar_details(b, j);
        const Eigen::ArrayXd ca = da.array() - da.mean();
        const Eigen::ArrayXd cb = db.array() - db.mean();
        const double va = ca.square().sum();
        const double vb = cb.square().sum();
        if (da.size() < 2 || va <= 0.0 || vb <= 0.0) {
            out.rho.emplace_back(std::nullopt);
            continue;
        }
        const double r = (ca * cb).sum() / std::sqrt(va * vb);
        out.rho.emplace_back(std::clamp(r, -1.0, 1.0));
    }
    return out;
}

CrossSpectrum cross_scale_correlation(const AnalysisWindow& a, const AnalysisWindow& b, Index j_first,
                                      Index j_last) {
    return cross_scale_correlation(a.q, b.q, j_first, j_last);
}

}  // namespace scalespec
