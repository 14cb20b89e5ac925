#include <cmath>

#include <doctest.h>

#include "spreadout/analysis.hpp"
#include "spreadout/exact.hpp"

using namespace spreadout;

namespace {
ModelParams make(int d, int L, double eps, double lambda, int n_max, int R) {
    ModelParams p;
    p.kernel = make_uniform_kernel(d, L);
    p.eps = eps;
    p.lambda = lambda;
    p.n_max = n_max;
    p.R = R;
    validate_params(p);
    return p;
}
}  // namespace

TEST_CASE("scaling fit recovers a synthetic Gaussian exactly") {
    GaussianFitInput in;
    in.d = 2;
    in.eps = 0.5;
    in.sigma2 = 1.5;
    in.slices = {8, 16, 32};
    in.probes = default_probes(2);
    const double A_true = 1.7, v_true = 2.3;
    const FourierEvaluator ev = [&](int n, const std::vector<double>& k) {
        double q2 = 0.0;
        for (double kc : k) q2 += kc * kc;
        return A_true * std::exp(-v_true * in.sigma2 * (n * in.eps) * q2 / (2.0 * in.d));
    };
    const ScalingFit fit = gaussian_fit(ev, in);
    CHECK(std::abs(fit.A - A_true) <= 1e-10);
    CHECK(std::abs(fit.v - v_true) <= 1e-10);
    CHECK(fit.drift <= 1e-8);
    CHECK(fit.points_used >= 2);
}

TEST_CASE("scaling fit rejects data that cannot pin the velocity") {
    GaussianFitInput in;
    in.d = 1;
    in.slices = {4};
    in.probes = {{0.25}};  // a single usable point
    in.sigma2 = 0.5;
    const FourierEvaluator ev = [](int, const std::vector<double>&) { return 1.0; };
    CHECK_THROWS_AS(gaussian_fit(ev, in), ValidationError);
}

TEST_CASE("divergence fit recovers the exact walk susceptibility") {
    // chi(lambda) = 1/(1 - lambda): C = 1, gamma = 1 at lambda_c = 1.
    std::vector<double> lambdas, chis;
    for (double l = 0.5; l < 0.96; l += 0.05) {
        lambdas.push_back(l);
        chis.push_back(1.0 / (1.0 - l));
    }
    const SusceptibilityFit fit = susceptibility_fit(lambdas, chis, 1.0);
    CHECK(std::abs(fit.C - 1.0) <= 1e-10);
    CHECK(std::abs(fit.gamma - 1.0) <= 1e-10);
    CHECK_THROWS_AS(susceptibility_fit({0.5, 1.0}, {2.0, 3.0}, 1.0), ValidationError);
}

TEST_CASE("triangle: transform route equals the direct space sum") {
    const ModelParams p = make(1, 1, 1.0, 0.5, 8, 8);
    const SpaceTimeField tau = rw_two_point(p);
    const FourierGrid grid = fourier_transform(p.kernel, 64);
    const TriangleEstimate tri = triangle_estimate(tau, grid, 8);
    CHECK(tri.value == doctest::Approx(1.3471410549245775).epsilon(1e-10));
    CHECK(tri.value == doctest::Approx(triangle_x_space(tau, 8)).epsilon(1e-12));
    CHECK(tri.tail >= 0.0);
    CHECK(tri.tail_slope < -1.0);

    // lambda = 0 leaves only the n = m = 0 term, which is 1.
    const ModelParams p0 = make(1, 1, 1.0, 0.0, 8, 8);
    const SpaceTimeField tau0 = rw_two_point(p0);
    CHECK(triangle_estimate(tau0, grid, 8).value == doctest::Approx(1.0).epsilon(1e-14));

    // Monotone in the coupling.
    const ModelParams ph = make(1, 1, 1.0, 0.25, 8, 8);
    CHECK(triangle_estimate(rw_two_point(ph), grid, 8).value < tri.value);
}

TEST_CASE("moment profile tracks the per-slice reductions") {
    const ModelParams p = make(1, 1, 0.5, 0.8, 6, 6);
    const SpaceTimeField tau = exact_two_point_dp(p);
    const MomentProfile prof = moment_profile(tau, p);
    REQUIRE(prof.tau_hat0.size() == static_cast<std::size_t>(p.n_max + 1));
    for (int n = 0; n <= p.n_max; ++n) {
        CHECK(prof.tau_hat0[n] == doctest::Approx(tau.slice_sum(n)).epsilon(1e-14));
        CHECK(prof.sup[n] == doctest::Approx(tau.slice_sup(n)).epsilon(1e-14));
        CHECK(prof.envelope[n] > 0.0);
    }
    CHECK(prof.second_ratio[0] == 0.0);
}

TEST_CASE("halving study is Cauchy on the confined exact model") {
    const ModelParams base = make(1, 1, 1.0, 0.8, 2, 5);
    const FieldBackend backend = [](const ModelParams& p) { return exact_two_point_dp(p); };
    const ContinuumStudy study = continuum_study(base, 2.0, 3, backend, true);
    REQUIRE(study.tau_ratios.size() == 2);
    CHECK(study.cauchy);
    for (double r : study.tau_ratios) CHECK(r < 1.0);
    for (double r : study.pi_ratios) CHECK(r < 1.0);
    // Non-integral t/eps at some level: rejected.
    CHECK_THROWS_AS(continuum_study(base, 1.0 / 3.0, 2, backend, false), ValidationError);
}

TEST_CASE("coupling calibration exceeds one and grows with the horizon") {
    const KernelD k = make_uniform_kernel(2, 2);
    const double l8 = calibrated_lambda(k, 8);
    const double l16 = calibrated_lambda(k, 16);
    CHECK(l8 > 1.0);
    CHECK(l16 >= l8);
    CHECK(l16 < 1.5);
}

TEST_CASE("growing-range run: geometry echoed, fit produced") {
    ScaledRangeConfig cfg;
    cfg.d = 2;
    cfg.b = 1.0;
    cfg.L1 = 0.5;
    cfg.T = 4.0;
    cfg.samples = 4000;
    cfg.seed = 2;
    const ScaledRangeResult res = scaled_range_experiment(cfg);
    CHECK(res.alpha == doctest::Approx(1.0));
    CHECK(res.L_T == 2);
    CHECK(res.beta_T == doctest::Approx(0.25));
    CHECK(res.lambda_used > 1.0);
    CHECK(res.horizon > 0);
    CHECK(res.fit.v > 0.0);

    ScaledRangeConfig bad = cfg;
    bad.b = 0.5;  // alpha = 0
    CHECK_THROWS_AS(scaled_range_experiment(bad), ValidationError);
}
