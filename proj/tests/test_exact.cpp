#include <cmath>

#include <doctest.h>

#include "spreadout/exact.hpp"

using namespace spreadout;

namespace {
ModelParams tiny(int L, double eps, double lambda, int n_max) {
    ModelParams p;
    p.kernel = make_uniform_kernel(1, L);
    p.eps = eps;
    p.lambda = lambda;
    p.n_max = n_max;
    p.R = L * n_max;
    validate_params(p);
    return p;
}
}  // namespace

TEST_CASE("subset chain: slice 0 is delta, slice 1 is the bond law") {
    const ModelParams p = tiny(1, 0.5, 0.8, 3);
    const SpaceTimeField tau = exact_two_point_dp(p);
    CHECK(tau.value(0, {0}) == 1.0);
    CHECK(tau.value(0, {1}) == 0.0);
    CHECK(tau.value(1, {0}) == doctest::Approx(0.5).epsilon(1e-15));   // 1 - eps
    CHECK(tau.value(1, {1}) == doctest::Approx(0.2).epsilon(1e-15));   // lambda*eps*D
    CHECK(tau.value(1, {-1}) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("hand oracle: two-slice return probability at eps = 1") {
    // lambda=0.8, L=1: p(+-1)=0.4, no temporal bond.  Slice-1 occupations of
    // +-1 are independent Bernoulli(0.4), each reinfects 0 with prob 0.4:
    // tau_2(0) = 1 - (1 - 0.16)^2.
    const ModelParams p = tiny(1, 1.0, 0.8, 2);
    const SpaceTimeField tau = exact_two_point_dp(p);
    CHECK(tau.value(2, {0}) == doctest::Approx(0.2944).epsilon(1e-14));
    CHECK(tau.value(2, {2}) == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(tau.value(2, {1}) == 0.0);  // parity
}

TEST_CASE("brute force over bond configurations agrees with the subset chain") {
    for (int L : {1, 2})
        for (double eps : {1.0, 0.5})
            for (double lambda : {0.3, 0.9, 1.2}) {
                const int n_max = L == 2 ? 1 : (eps == 1.0 ? 3 : 2);
                const ModelParams p = tiny(L, eps, lambda, n_max);
                CAPTURE(L);
                CAPTURE(eps);
                CAPTURE(lambda);
                const SpaceTimeField dp = exact_two_point_dp(p);
                const SpaceTimeField bf = brute_force_two_point(p);
                CHECK(dp.max_abs_diff(bf) <= 1e-12);
            }
}

TEST_CASE("bond enumeration is consistent with its count") {
    const ModelParams p = tiny(1, 0.5, 0.9, 2);
    CHECK(static_cast<long>(enumerate_bonds(p).size()) == count_positive_bonds(p));
}

TEST_CASE("double connection at distance two: closed form (lambda/2)^4") {
    const ModelParams p = tiny(1, 1.0, 0.8, 2);
    const SpaceTimeField pi0 = brute_force_piN(p, 0);
    CHECK(pi0.value(0, {0}) == doctest::Approx(1.0));
    CHECK(pi0.value(2, {0}) == doctest::Approx(std::pow(0.4, 4)).epsilon(1e-13));
    // One step can never be doubly connected when only one bond can land there.
    CHECK(pi0.value(1, {1}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("window caps raise the cap error") {
    ModelParams p = tiny(1, 1.0, 0.5, 12);  // 25-cell window
    CHECK_THROWS_AS(exact_two_point_dp(p), CapError);
    CHECK_THROWS_AS(brute_force_two_point(p), CapError);
}
