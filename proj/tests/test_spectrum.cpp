#include "scalespec/spectrum.hpp"
#include "scalespec/synth.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace scalespec;

TEST_CASE("haar_details on an alternating window") {
    const VectorXd q{{0.0, 1.0, 0.0, 1.0}};
    const double r = 1.0 / std::sqrt(2.0);
    const VectorXd d1 = haar_details(q, 1);
    REQUIRE(d1.size() == 3);
    CHECK(d1[0] == doctest::Approx(-r).epsilon(1e-15));
    CHECK(d1[1] == doctest::Approx(r).epsilon(1e-15));
    CHECK(d1[2] == doctest::Approx(-r).epsilon(1e-15));

    const VectorXd d2 = haar_details(q, 2);
    REQUIRE(d2.size() == 1);
    CHECK(d2[0] == 0.0);

    CHECK_THROWS_AS(haar_details(q, 0), std::invalid_argument);
    CHECK_THROWS_AS(haar_details(q, 3), std::invalid_argument);
}

TEST_CASE("haar_details on a linear ramp is constant") {
    const double a = 0.37;
    VectorXd q(64);
    for (Index m = 0; m < q.size(); ++m) q[m] = a * static_cast<double>(m + 1);
    for (Index j = 1; j <= 32; ++j) {
        const VectorXd d = haar_details(q, j);
        const double expected = -a * static_cast<double>(j * j) / std::sqrt(2.0 * static_cast<double>(j));
        for (Index i = 0; i < d.size(); ++i) {
            CHECK(d[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("haar_details matches the direct double sum") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    VectorXd q(50);
    for (Index i = 0; i < q.size(); ++i) q[i] = 10.0 + normal(rng);
    for (Index j = 1; j <= 25; ++j) {
        const VectorXd d = haar_details(q, j);
        for (Index i = 1; i <= q.size() - 2 * j + 1; ++i) {
            double direct = 0.0;
            for (Index k = 0; k < j; ++k) direct += q[k + i - 1] - q[k + i + j - 1];
            direct /= std::sqrt(2.0 * static_cast<double>(j));
            CHECK(d[i - 1] == doctest::Approx(direct).epsilon(1e-11));
        }
    }
}

TEST_CASE("scale_spectrum basics") {
    const VectorXd q{{0.0, 1.0, 0.0, 1.0}};
    const auto s = scale_spectrum(q, 1, 1);
    CHECK(s.s[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.counts[0] == 3);

    const auto flat = scale_spectrum(VectorXd::Constant(40, 3.3), 1, 20);
    CHECK((flat.s.array() == 0.0).all());

    CHECK_THROWS_AS(scale_spectrum(q, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(scale_spectrum(q, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(scale_spectrum(q, 2, 1), std::invalid_argument);
}

TEST_CASE("scale_spectrum invariants: shift, scaling, counts") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        const Index M = 20 + 13 * trial;
        VectorXd q(M);
        q[0] = 0.0;
        for (Index i = 1; i < M; ++i) q[i] = q[i - 1] + normal(rng);
        const auto base = scale_spectrum(q, 1, M / 2);

        const auto shifted = scale_spectrum(VectorXd(q.array() + 1234.5), 1, M / 2);
        CHECK((shifted.s - base.s).cwiseAbs().maxCoeff() <= 1e-9 * base.s.maxCoeff());

        // Power-of-two scaling is exact in floating point.
        const auto scaled = scale_spectrum(VectorXd(q * 8.0), 1, M / 2);
        CHECK(scaled.s == VectorXd(base.s * 64.0));

        const double lambda = 0.731;
        const auto scaled2 = scale_spectrum(VectorXd(q * lambda), 1, M / 2);
        for (Index k = 0; k < base.size(); ++k) {
            CHECK(scaled2.s[k] == doctest::Approx(base.s[k] * lambda * lambda).epsilon(1e-12));
        }

        for (std::size_t k = 1; k < base.counts.size(); ++k) {
            CHECK(base.counts[k] < base.counts[k - 1]);
        }
        CHECK(base.counts.back() >= 1);
        CHECK((base.s.array() >= 0.0).all());
    }
}

TEST_CASE("quadratic-form oracle: Brownian closed form (2j^2+1)/6") {
    for (Index j = 1; j <= 8; ++j) {
        const double expected = (2.0 * static_cast<double>(j * j) + 1.0) / 6.0;
        CHECK(oracle::expected_spectrum(0.5, 32, j) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo mean of S_j for Brownian increments matches the closed form") {
    const Index M = 32;
    const int draws = 4000;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    VectorXd sum = VectorXd::Zero(8);
    VectorXd sum_sq = VectorXd::Zero(8);
    VectorXd q(M);
    for (int d = 0; d < draws; ++d) {
        q[0] = 0.0;
        for (Index i = 1; i < M; ++i) q[i] = q[i - 1] + normal(rng);
        const auto s = scale_spectrum(q, 1, 8);
        sum += s.s;
        sum_sq += s.s.cwiseAbs2();
    }
    for (Index j = 1; j <= 8; ++j) {
        const double mean = sum[j - 1] / draws;
        const double var = sum_sq[j - 1] / draws - mean * mean;
        const double se = std::sqrt(var / draws);
        const double expected = (2.0 * static_cast<double>(j * j) + 1.0) / 6.0;
        CHECK(std::abs(mean - expected) <= 3.0 * se);
    }
}

TEST_CASE("cross_scale_correlation") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    VectorXd a(128);
    a[0] = 0.0;
    for (Index i = 1; i < a.size(); ++i) a[i] = a[i - 1] + normal(rng);

    const auto self = cross_scale_correlation(a, a, 1, 32);
    for (const auto& r : self.rho) {
        REQUIRE(r);
        CHECK(*r == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto flip = cross_scale_correlation(a, VectorXd(-a), 1, 32);
    for (const auto& r : flip.rho) {
        REQUIRE(r);
        CHECK(*r == doctest::Approx(-1.0).epsilon(1e-12));
    }
    const auto with_flat = cross_scale_correlation(a, VectorXd::Constant(128, 2.0), 1, 32);
    for (const auto& r : with_flat.rho) {
        CHECK_FALSE(r.has_value());
    }
    CHECK_THROWS_AS(cross_scale_correlation(a, VectorXd(a.head(64)), 1, 8), std::invalid_argument);
}

namespace {

// Null standard deviation of the sample correlation of two independent
// copies of the scale-j detail sequence of Brownian motion (Bartlett):
// Var ~ (1/N) sum_m (1 - |m|/N) rho(m)^2, rho the tent-filter autocorrelation.
double null_correlation_sd(Index j, Index nj) {
    std::vector<double> tent(static_cast<std::size_t>(2 * j - 1));
    for (Index u = 0; u < 2 * j - 1; ++u) tent[static_cast<std::size_t>(u)] = static_cast<double>(std::min(u + 1, 2 * j - 1 - u));
    auto autocov = [&](Index m) {
        double acc = 0.0;
        for (Index u = 0; u + m < 2 * j - 1; ++u) acc += tent[static_cast<std::size_t>(u)] * tent[static_cast<std::size_t>(u + m)];
        return acc;
    };
    const double c0 = autocov(0);
    double var = 1.0;
    for (Index m = 1; m < std::min(nj, 2 * j - 1); ++m) {
        const double rho = autocov(m) / c0;
        var += 2.0 * (1.0 - static_cast<double>(m) / static_cast<double>(nj)) * rho * rho;
    }
    return std::sqrt(var / static_cast<double>(nj));
}

}  // namespace

TEST_CASE("cross_scale_correlation of independent Brownian paths is small") {
    const Index M = 4096;
    const auto a = synth_fbm(GaussianProcessSpec::constant(0.5, 1.0, M, 101)).values();
    const auto b = synth_fbm(GaussianProcessSpec::constant(0.5, 1.0, M, 202)).values();
    const Index je = 64;
    const auto cross = cross_scale_correlation(a, b, 1, je);
    int within_naive = 0;
    int within_corrected = 0;
    const Index je_naive = 4;  // overlap correlation is negligible only here
    for (Index j = 1; j <= je; ++j) {
        const auto& r = cross.rho[static_cast<std::size_t>(j - 1)];
        REQUIRE(r);
        CHECK(std::abs(*r) <= 1.0);
        const Index nj = M - 2 * j + 1;
        if (j <= je_naive && std::abs(*r) <= 3.0 / std::sqrt(static_cast<double>(nj))) ++within_naive;
        if (std::abs(*r) <= 3.0 * null_correlation_sd(j, nj)) ++within_corrected;
    }
    CHECK(within_naive >= static_cast<int>(0.9 * je_naive));
    CHECK(within_corrected >= static_cast<int>(0.9 * je));
}
