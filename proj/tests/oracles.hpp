#pragma once

// Brute-force reference computations used only by tests. Everything here is
// built from the textbook definitions with dense matrices and is kept apart
// from the library's fast paths.

#include "scalespec/core.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

using scalespec::Index;
using scalespec::MatrixXd;
using scalespec::VectorXd;

inline double fgn_gamma(double H, Index k) {
    const double a = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(a + 1.0, 2 * H) - 2.0 * std::pow(a, 2 * H) + std::pow(std::abs(a - 1.0), 2 * H));
}

inline MatrixXd fgn_covariance_matrix(double H, Index n) {
    MatrixXd c(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) c(i, j) = fgn_gamma(H, i - j);
    return c;
}

// Exact standard error of the zero-mean sample autocovariance at lag k,
// (1/(n-k)) sum_t x_t x_{t+k}, for unit fGn (Isserlis' theorem).
inline double autocov_standard_error(double H, Index n, Index k) {
    const Index m = n - k;
    double acc = 0.0;
    for (Index d = -(m - 1); d <= m - 1; ++d) {
        const double weight = static_cast<double>(m - std::abs(d));
        acc += weight * (fgn_gamma(H, d) * fgn_gamma(H, d) + fgn_gamma(H, d + k) * fgn_gamma(H, d - k));
    }
    return std::sqrt(acc) / static_cast<double>(m);
}

// Weights of d_j(i) on the increments x_1..x_{M-1} of a window of M samples,
// written directly from the double sum over (q_{k+i} - q_{k+i+j}).
inline VectorXd haar_increment_weights(Index M, Index j, Index i) {
    VectorXd q_weights = VectorXd::Zero(M);  // weights on q_1..q_M
    for (Index k = 0; k < j; ++k) {
        q_weights[k + i - 1] += 1.0;
        q_weights[k + i + j - 1] -= 1.0;
    }
    q_weights /= std::sqrt(2.0 * static_cast<double>(j));
    // q_m = q_1 + sum_{t < m} x_t  =>  weight on x_t is sum_{m > t} q_weights[m]
    VectorXd w = VectorXd::Zero(M - 1);
    for (Index t = 1; t <= M - 1; ++t)
        for (Index m = t + 1; m <= M; ++m) w[t - 1] += q_weights[m - 1];
    return w;
}

// E[S_j] for unit-sigma fGn increments: (1/N_j) sum_i w_i^T Gamma w_i.
inline double expected_spectrum(double H, Index M, Index j) {
    const MatrixXd gamma = fgn_covariance_matrix(H, M - 1);
    const Index nj = M - 2 * j + 1;
    double acc = 0.0;
    for (Index i = 1; i <= nj; ++i) {
        const VectorXd w = haar_increment_weights(M, j, i);
        acc += w.dot(gamma * w);
    }
    return acc / static_cast<double>(nj);
}

// Cov(S_j, S_k) = 2 tr(A_j Gamma A_k Gamma) with A_j = (1/N_j) sum_i w w^T.
inline double spectrum_covariance(double H, Index M, Index j, Index k) {
    const MatrixXd gamma = fgn_covariance_matrix(H, M - 1);
    auto a_matrix = [&](Index s) {
        const Index ns = M - 2 * s + 1;
        MatrixXd a = MatrixXd::Zero(M - 1, M - 1);
        for (Index i = 1; i <= ns; ++i) {
            const VectorXd w = haar_increment_weights(M, s, i);
            a += w * w.transpose();
        }
        return MatrixXd(a / static_cast<double>(ns));
    };
    const MatrixXd aj = a_matrix(j) * gamma;
    const MatrixXd ak = a_matrix(k) * gamma;
    return 2.0 * (aj * ak).trace();
}

// Gaussian negative log-likelihood by dense Cholesky.
inline double dense_negloglik(const VectorXd& x, double H, double sigma) {
    const Index n = x.size();
    const MatrixXd cov = fgn_covariance_matrix(H, n) * sigma * sigma;
    Eigen::LLT<MatrixXd> llt(cov);
    const VectorXd z = llt.matrixL().solve(x);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + 0.5 * log_det + 0.5 * z.squaredNorm();
}

// Composite Gauss-Legendre-free quadrature of the C(h) integral
//   int_R 4 sin^2(xi/2) |xi|^{-1-2h} dxi
// using substitution xi = e^u on (0, inf), doubled for symmetry, with a
// fine trapezoid rule and analytic tails.
inline double c_normalization_quadrature(double h) {
    // small xi: 4 sin^2(xi/2) ~ xi^2 => int_0^a xi^{1-2h} = a^{2-2h}/(2-2h)
    // large xi: average 4 sin^2 = 2; tail handled by integrating to a large
    // bound and adding 2 b^{-2h}/(2h) for the mean part.
    const double a = 1e-6;
    const double b = 2e5;
    const int steps = 4000000;
    const double lu0 = std::log(a);
    const double lu1 = std::log(b);
    const double du = (lu1 - lu0) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double u = lu0 + du * i;
        const double xi = std::exp(u);
        const double s = std::sin(xi / 2.0);
        const double f = 4.0 * s * s * std::pow(xi, -2.0 * h);  // integrand * xi (dxi = xi du)
        sum += (i == 0 || i == steps) ? 0.5 * f : f;
    }
    double integral = sum * du;
    integral += std::pow(a, 2.0 - 2.0 * h) / (2.0 - 2.0 * h);
    integral += 2.0 * std::pow(b, -2.0 * h) / (2.0 * h);
    return 2.0 * integral;
}

}  // namespace oracle
