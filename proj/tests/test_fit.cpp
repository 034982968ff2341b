#include "scalespec/fit.hpp"
#include "scalespec/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace scalespec;

namespace {

ScaleSpectrum make_spectrum(Index ji, Index je, const std::function<double(Index)>& s_of_j) {
    ScaleSpectrum s;
    s.j_first = ji;
    s.j_last = je;
    s.s.resize(je - ji + 1);
    for (Index j = ji; j <= je; ++j) {
        s.s[j - ji] = s_of_j(j);
        s.counts.push_back(2 * je + 1 - 2 * j + 1);
    }
    s.effective_window = 2 * je + 1;
    return s;
}

double power_law(double H, double sigma, Index j) {
    return sigma * sigma * h_scaling(H) * std::pow(2.0 * static_cast<double>(j), 2.0 * H + 1.0);
}

}  // namespace

TEST_CASE("h_scaling closed form") {
    CHECK(h_scaling(0.5) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    // Independent re-derivation: 2^{-1/2} = 1/sqrt(2), (2H+2)(2H+1) = 2.5 * 1.5.
    CHECK(h_scaling(0.25) == doctest::Approx((1.0 - 1.0 / std::sqrt(2.0)) / 3.75).epsilon(1e-14));
    double prev = h_scaling(0.01);
    for (int k = 1; k <= 99; ++k) {
        const double h = h_scaling(0.01 * k);
        CHECK(h > 0.0);
        CHECK(std::abs(h - prev) < 0.01);
        prev = h;
    }
    CHECK_THROWS_AS(h_scaling(0.0), std::invalid_argument);
    CHECK_THROWS_AS(h_scaling(1.0), std::invalid_argument);
}

TEST_CASE("gls_fit recovers an exact power law") {
    const auto spec = make_spectrum(1, 40, [](Index j) { return power_law(0.5, 1.0, j); });
    for (int q : {1, 3}) {
        const auto fit = gls_fit(spec, q);
        CHECK(fit.c_hat == doctest::Approx(std::log2(1.0 / 12.0)).epsilon(1e-12));
        CHECK(fit.p_hat == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.h_hat == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fit.sigma_step == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.misfit < 1e-12);
    }
    CHECK(gls_fit(spec, 1).branch == FitBranch::linear_weight);
    CHECK(gls_fit(spec, 3).branch == FitBranch::cubic_weight);
    const auto robust = robust_fit(spec);
    CHECK(robust.branch == FitBranch::linear_weight);
    CHECK(robust.h_hat == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gls_fit weight invariance on exact affine data") {
    for (double H : {0.1, 0.3, 0.62, 0.9}) {
        const auto spec = make_spectrum(2, 57, [H](Index j) { return power_law(H, 0.37, j); });
        const auto a = gls_fit(spec, 1);
        const auto b = gls_fit(spec, 3);
        CHECK(a.c_hat == doctest::Approx(b.c_hat).epsilon(1e-12));
        CHECK(a.p_hat == doctest::Approx(b.p_hat).epsilon(1e-12));
        CHECK(a.sigma_step == doctest::Approx(0.37).epsilon(1e-12));
    }
}

TEST_CASE("linear ramp clamps at the upper Hurst bound") {
    const double a = 0.01;
    VectorXd q(512);
    for (Index m = 0; m < q.size(); ++m) q[m] = a * static_cast<double>(m + 1);
    const auto spec = scale_spectrum(q, 1, 256);
    for (Index j = 1; j <= 256; ++j) {
        const double jj = static_cast<double>(j);
        CHECK(spec.at_scale(j) == doctest::Approx(a * a * jj * jj * jj / 2.0).epsilon(1e-9));
    }
    const auto fit = gls_fit(spec, 1);
    CHECK(fit.p_hat == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.h_hat == 0.95);
    CHECK(std::isfinite(fit.sigma_step));
}

TEST_CASE("gls_fit errors") {
    auto spec = make_spectrum(1, 10, [](Index j) { return power_law(0.5, 1.0, j); });
    spec.s[3] = 0.0;
    CHECK_THROWS_AS(gls_fit(spec, 1), ComputationError);
    CHECK_THROWS_AS(robust_fit(spec), ComputationError);
    const auto one = make_spectrum(3, 3, [](Index) { return 1.0; });
    CHECK_THROWS_AS(gls_fit(one, 1), ComputationError);
    CHECK_THROWS_AS(fixed_h_fit(one, 0.5), ComputationError);
    const auto ok = make_spectrum(1, 10, [](Index j) { return power_law(0.5, 1.0, j); });
    CHECK_THROWS_AS(gls_fit(ok, 2), std::invalid_argument);
    CHECK_THROWS_AS(fixed_h_fit(ok, 1.0), std::invalid_argument);
}

TEST_CASE("clamp and amplitude equivariance on random walks") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        VectorXd q(200);
        q[0] = 0.0;
        const double drift = trial % 5 == 0 ? 0.5 : 0.0;
        for (Index i = 1; i < q.size(); ++i) q[i] = q[i - 1] + drift + normal(rng);
        const auto base = scale_spectrum(q, 1, 100);
        const double lambda = 0.25 + 0.1 * trial;
        const auto scaled = scale_spectrum(VectorXd(q * lambda), 1, 100);
        for (int w : {1, 3}) {
            const auto f = gls_fit(base, w);
            const auto g = gls_fit(scaled, w);
            CHECK(f.h_hat >= kHurstMin);
            CHECK(f.h_hat <= kHurstMax);
            CHECK(g.h_hat == doctest::Approx(f.h_hat).epsilon(1e-12));
            CHECK(g.sigma_step == doctest::Approx(lambda * f.sigma_step).epsilon(1e-12));
        }
        const auto r = robust_fit(base);
        CHECK(r.h_hat >= gls_fit(base, 1).h_hat);
        CHECK(r.h_hat >= gls_fit(base, 3).h_hat);
    }
}

TEST_CASE("robust_fit under a small-scale noise floor") {
    const double kappa = 50.0;
    const auto spec = make_spectrum(1, 64, [kappa](Index j) { return power_law(0.8, 1.0, j) + kappa; });
    const auto linear = gls_fit(spec, 1);
    const auto cubic = gls_fit(spec, 3);
    const auto robust = robust_fit(spec);
    CHECK(robust.h_hat >= linear.h_hat);
    CHECK(robust.h_hat == std::max(linear.h_hat, cubic.h_hat));
    // The floor flattens small scales, which the cubic weights emphasize.
    CHECK(cubic.h_hat < linear.h_hat);
    CHECK(robust.branch == FitBranch::linear_weight);
    CHECK(robust.c_hat == linear.c_hat);
    CHECK(robust.misfit == linear.misfit);

    // Steeper small scales favour the cubic branch; fields follow the argmax.
    const auto steep = make_spectrum(1, 64, [](Index j) {
        return j <= 8 ? power_law(0.8, 1.0, j) : power_law(0.8, 1.0, 8) * std::pow(j / 8.0, 1.4);
    });
    const auto r2 = robust_fit(steep);
    CHECK(r2.branch == FitBranch::cubic_weight);
    CHECK(r2.c_hat == gls_fit(steep, 3).c_hat);
    CHECK(r2.misfit == gls_fit(steep, 3).misfit);
    CHECK(r2.h_hat > gls_fit(steep, 1).h_hat);
}

TEST_CASE("fixed_h_fit") {
    const auto exact = make_spectrum(1, 30, [](Index j) { return power_law(0.5, 2.0, j); });
    const auto f = fixed_h_fit(exact, 0.5);
    CHECK(f.branch == FitBranch::fixed_h);
    CHECK(f.h_hat == 0.5);
    CHECK(f.p_hat == 2.0);
    CHECK(f.sigma_step == doctest::Approx(gls_fit(exact, 1).sigma_step).epsilon(1e-12));
    CHECK(f.sigma_step == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.misfit < 1e-12);

    const auto mismatch = make_spectrum(1, 30, [](Index j) { return power_law(0.7, 1.0, j); });
    CHECK(fixed_h_fit(mismatch, 0.5).misfit > 0.1);
    CHECK(fixed_h_fit(mismatch, 0.7).misfit < 1e-12);
}

TEST_CASE("spectral_misfit") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    VectorXd q(300);
    q[0] = 0.0;
    for (Index i = 1; i < q.size(); ++i) q[i] = q[i - 1] + normal(rng);
    auto spec = scale_spectrum(q, 1, 150);
    const auto fit = gls_fit(spec, 1);
    auto doubled = spec;
    doubled.s *= 2.0;
    const auto refit = gls_fit(doubled, 1);
    CHECK(refit.misfit == doctest::Approx(fit.misfit).epsilon(1e-12));
    CHECK(refit.c_hat == doctest::Approx(fit.c_hat + 1.0).epsilon(1e-12));

    // Alternating residuals of size delta around a fixed line.
    const double delta = 0.3;
    const auto line = line_from_parameters(0.6, 1.5, 1, 20, FitBranch::linear_weight);
    const auto alt = make_spectrum(1, 20, [&](Index j) {
        const double y = line.c_hat + line.p_hat * std::log2(2.0 * static_cast<double>(j));
        return std::exp2(y + (j % 2 == 1 ? delta : -delta));
    });
    CHECK(spectral_misfit(alt, line) == doctest::Approx(delta).epsilon(1e-12));

    auto wrong = line;
    wrong.j_last = 19;
    CHECK_THROWS_AS(spectral_misfit(alt, wrong), std::invalid_argument);
}

TEST_CASE("per_scale_residual") {
    const auto line = line_from_parameters(0.4, 0.8, 1, 16, FitBranch::ml);
    auto spec = make_spectrum(1, 16, [](Index j) { return power_law(0.4, 0.8, j); });
    CHECK(per_scale_residual(spec, line).maxCoeff() < 1e-24);
    spec.s[6] *= 4.0;
    const VectorXd r = per_scale_residual(spec, line);
    for (Index k = 0; k < r.size(); ++k) {
        if (k == 6) {
            CHECK(r[k] == doctest::Approx(4.0).epsilon(1e-12));
        } else {
            CHECK(r[k] < 1e-24);
        }
    }
}

TEST_CASE("annualize") {
    CHECK(annualize(0.02, 0.5) == doctest::Approx(0.02 * std::sqrt(252.0)).epsilon(1e-14));
    CHECK(annualize(0.02, 0.0) == 0.02);
    CHECK(annualize(0.02, 0.3, 12.0) == doctest::Approx(0.02 * std::pow(12.0, 0.3)).epsilon(1e-14));
    for (double H : {0.05, 0.46, 0.95}) {
        CHECK(deannualize(annualize(0.013, H), H) == doctest::Approx(0.013).epsilon(1e-14));
    }
    CHECK_THROWS_AS(annualize(0.02, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("gls_fit on fBm is unbiased at moderate length") {
    const int replicas = 40;
    double sum = 0.0;
    for (int r = 0; r < replicas; ++r) {
        const auto path = synth_fbm(GaussianProcessSpec::constant(0.7, 1.0, 2048, 300 + r)).values();
        sum += gls_fit(scale_spectrum(path, 1, 256), 1).h_hat;
    }
    CHECK(std::abs(sum / replicas - 0.7) < 0.04);
}
