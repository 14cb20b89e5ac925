#include <cmath>

#include <doctest.h>

#include "spreadout/kernel.hpp"

using namespace spreadout;

TEST_CASE("uniform kernel: masses, beta, sup constant") {
    const KernelD k1 = make_uniform_kernel(1, 1);
    CHECK(k1.entries.size() == 2);
    CHECK(k1.mass({1}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k1.mass({0}) == 0.0);
    CHECK(k1.mass({2}) == 0.0);
    CHECK(k1.beta == doctest::Approx(1.0));
    CHECK(k1.sup_constant == doctest::Approx(0.5));

    const KernelD k2 = make_uniform_kernel(2, 1);
    CHECK(k2.entries.size() == 8);
    CHECK(k2.mass({1, 1}) == doctest::Approx(0.125));

    const KernelD k12 = make_uniform_kernel(1, 2);
    CHECK(k12.entries.size() == 4);
    CHECK(k12.beta == doctest::Approx(0.5));
    validate_kernel(k1);
    validate_kernel(k2);
    validate_kernel(k12);
}

TEST_CASE("kernel moments: hand-computed variances") {
    // d=1, L=2: sum |x|^2 / 4 over {+-1, +-2} = 2*(1+4)/4.
    const KernelMoments m12 = kernel_moments(make_uniform_kernel(1, 2));
    CHECK(m12.sigma2 == doctest::Approx(2.5).epsilon(1e-15));

    // d=2, L=1: 4 sides at |x|^2=1 and 4 corners at |x|^2=2, mass 1/8 each.
    const KernelMoments m21 = kernel_moments(make_uniform_kernel(2, 1));
    CHECK(m21.sigma2 == doctest::Approx(1.5).epsilon(1e-15));
    // sum |x|^4 / 8 = (4*1 + 4*4)/8.
    CHECK(m21.moment_2p2Delta == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(m21.c1 == doctest::Approx(std::sqrt(1.5)));
}

TEST_CASE("dual-torus transform: closed form for d=1, L=1") {
    const KernelD k = make_uniform_kernel(1, 1);
    const FourierGrid g = fourier_transform(k, 8);
    REQUIRE(g.size() == 8);
    for (long j = 0; j < g.size(); ++j) {
        const double kk = g.kvec(j)[0];
        CHECK(g.dhat[j] == doctest::Approx(std::cos(kk)).epsilon(1e-14));
        CHECK(g.avals[j] == doctest::Approx(1.0 - std::cos(kk)).epsilon(1e-14));
    }
    // Dhat(pi) = -1, so a attains 2 and the aperiodicity margin vanishes.
    CHECK(g.eta == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("transform round trip recovers the kernel weights") {
    for (int d : {1, 2}) {
        const KernelD k = make_uniform_kernel(d, 2);
        const FourierGrid g = fourier_transform(k, 16);
        const auto back = inverse_transform(g, 2);
        for (const auto& [off, w] : back) {
            CHECK(w == doctest::Approx(k.mass(off)).epsilon(0).scale(1).epsilon(1e-12));
        }
    }
}

TEST_CASE("convolution powers at the origin") {
    const KernelD k = make_uniform_kernel(1, 1);
    // (D*D)(0) = 2 * (1/2)^2.
    CHECK(convolution_power_at_origin(k, 2) == doctest::Approx(0.5).epsilon(1e-14));
    // Odd powers vanish at 0 by parity of the support.
    CHECK(convolution_power_at_origin(k, 3) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("walk Green sum: route agreement and recurrence guard") {
    const KernelD k3 = make_uniform_kernel(3, 1);
    const GreensSumResult a = rw_greens_sum(k3, 40, TailMode::FourierIntegral, 32);
    const GreensSumResult b = rw_greens_sum(k3, 40, TailMode::Truncate);
    CHECK(a.value > 0.0);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-6);
    CHECK(a.beta_ratio > 0.0);

    const KernelD k1 = make_uniform_kernel(1, 1);
    CHECK_THROWS_AS(rw_greens_sum(k1, 40, TailMode::FourierIntegral, 32), InvariantError);
    CHECK(rw_greens_sum(k1, 40, TailMode::Truncate).partial_sum > 0.0);
}

TEST_CASE("kernel json round trip") {
    const KernelD k = make_uniform_kernel(2, 1);
    const KernelD back = kernel_from_json(kernel_to_json(k));
    REQUIRE(back.entries.size() == k.entries.size());
    CHECK(back.d == k.d);
    CHECK(back.L == k.L);
    for (std::size_t i = 0; i < k.entries.size(); ++i) {
        CHECK(back.entries[i].first == k.entries[i].first);
        CHECK(back.entries[i].second == doctest::Approx(k.entries[i].second).epsilon(1e-15));
    }
}
