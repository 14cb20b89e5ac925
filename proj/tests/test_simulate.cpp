#include <cmath>

#include <doctest.h>

#include "spreadout/exact.hpp"
#include "spreadout/simulate.hpp"

using namespace spreadout;

namespace {
ModelParams make(int L, double eps, double lambda, int n_max, int R) {
    ModelParams p;
    p.kernel = make_uniform_kernel(1, L);
    p.eps = eps;
    p.lambda = lambda;
    p.n_max = n_max;
    p.R = R;
    validate_params(p);
    return p;
}
}  // namespace

TEST_CASE("counter generator: deterministic, uniform range") {
    CHECK(rng_mix(12, 34) == rng_mix(12, 34));
    CHECK(rng_mix(12, 34) != rng_mix(12, 35));
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = rng_uniform(rng_mix(7, i));
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("cluster estimate: slice 0 exact, slice 1 within four sigma") {
    const ModelParams p = make(1, 0.5, 0.8, 2, 2);
    const long samples = 20000;
    const EstimatorResult est = estimate_two_point(p, samples, 11);
    CHECK(est.mean.value(0, {0}) == 1.0);
    CHECK(est.stderr_.value(0, {0}) == 0.0);
    // Slice 1 is literally the bond distribution.
    const double probs[3] = {0.2, 0.5, 0.2};
    for (int x = -1; x <= 1; ++x) {
        const double truth = probs[x + 1];
        const double sigma = std::sqrt(truth * (1 - truth) / samples);
        CHECK(std::abs(est.mean.value(1, {x}) - truth) <= 4 * sigma);
    }
}

TEST_CASE("replica streams: same seed reproduces, different seed moves") {
    const ModelParams p = make(1, 1.0, 0.8, 3, 3);
    const EstimatorResult a = estimate_two_point(p, 2000, 5);
    const EstimatorResult b = estimate_two_point(p, 2000, 5);
    const EstimatorResult c = estimate_two_point(p, 2000, 6);
    CHECK(a.mean.max_abs_diff(b.mean) == 0.0);
    CHECK(a.mean.max_abs_diff(c.mean) > 0.0);
    // Thread count must not change the estimate (counter-based streams).
    const EstimatorResult d = estimate_two_point(p, 2000, 5, 2);
    CHECK(a.mean.max_abs_diff(d.mean) == 0.0);
}

TEST_CASE("pooled merge is the sample-weighted average") {
    const ModelParams p = make(1, 1.0, 0.8, 2, 2);
    const EstimatorResult a = estimate_two_point(p, 1000, 1);
    const EstimatorResult b = estimate_two_point(p, 3000, 2);
    const EstimatorResult m = merge_estimates(a, b);
    CHECK(m.samples == 4000);
    const double expect =
        (1000 * a.mean.value(2, {0}) + 3000 * b.mean.value(2, {0})) / 4000.0;
    CHECK(m.mean.value(2, {0}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("double-connection estimator hits the closed form (lambda/2)^4") {
    const ModelParams p = make(1, 1.0, 0.8, 2, 2);
    const long samples = 100000;
    const EstimatorResult est = estimate_pi0(p, samples, 3);
    CHECK(est.mean.value(0, {0}) == 1.0);
    const double truth = std::pow(0.4, 4);
    const double sigma = std::sqrt(truth * (1 - truth) / samples);
    CHECK(std::abs(est.mean.value(2, {0}) - truth) <= 4 * sigma);
}

TEST_CASE("transform estimator at k = 0 equals the cluster mass") {
    const ModelParams p = make(1, 1.0, 0.8, 3, 3);
    const auto vals = estimate_fourier(p, {1, 3}, {{0.0}}, 5000, 9);
    const EstimatorResult est = estimate_two_point(p, 5000, 9);
    CHECK(vals[0][0] == doctest::Approx(est.per_slice[1].tau_hat0).epsilon(1e-12));
    CHECK(vals[1][0] == doctest::Approx(est.per_slice[3].tau_hat0).epsilon(1e-12));
}

TEST_CASE("growth beyond the window is an invariant violation") {
    // lambda*eps*D = 1 on both neighbors: the frontier reaches |x| = 2 at
    // slice 2 with certainty, outside the R = 1 window.
    const ModelParams p = make(1, 1.0, 2.0, 4, 1);
    CHECK_THROWS_AS(estimate_two_point(p, 10, 1), InvariantError);
}
