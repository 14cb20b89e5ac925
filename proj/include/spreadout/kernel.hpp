// kernel.hpp -- the spread-out step distribution D, its moments, Fourier
// transform on the dual torus, and random-walk Green-sum quantities.
//
// D is the uniform distribution over the punctured cube 0 < ||x||_inf <= L:
// D(x) = 1/((2L+1)^d - 1).  All derived quantities (variance, higher moments,
// the smallness parameter beta = L^{-d}, the aperiodicity margin eta) are
// measured from the constructed kernel rather than assumed.

#pragma once

#include <utility>
#include <vector>

#include "spreadout/errors.hpp"

namespace spreadout {

struct KernelD {
    int d = 1;
    int L = 1;
    // (offset, mass) pairs in lexicographic offset order, positive masses only.
    std::vector<std::pair<std::vector<int>, double>> entries;
    double beta = 1.0;          // L^{-d}
    double sup_mass = 0.0;      // max_x D(x)
    double sup_constant = 0.0;  // sup_mass * L^d, the measured C with sup D <= C L^{-d}

    double mass(const std::vector<int>& x) const;  // 0 outside the support
};

// Uniform kernel over the punctured cube of radius L.  Rejects supports
// larger than support_cap sites.
KernelD make_uniform_kernel(int d, int L, long support_cap = (1L << 22));

// Checks: D(o)=0, sum D = 1, full lattice-symmetry orbit equality (tol each).
void validate_kernel(const KernelD& k, double tol = 1e-12);

struct KernelMoments {
    double sigma2 = 0.0;           // sum |x|^2 D(x)
    double moment_2p2Delta = 0.0;  // sum |x|^{2+2Delta} D(x)
    double Delta = 1.0;
    double c1 = 0.0;  // measured sigma / L lower witness (= sigma/L)
    double c2 = 0.0;  // measured sigma / L upper witness (= sigma/L)
};

KernelMoments kernel_moments(const KernelD& k, double Delta = 1.0);

// Uniform M^d grid on the dual torus, k_j = 2*pi*m_j/M mapped into (-pi,pi].
// Convention: fhat(k) = sum_x f(x) e^{ik.x}; real here by symmetry.
struct FourierGrid {
    int d = 1;
    int M = 2;
    std::vector<double> dhat;   // Dhat(k) per flat grid index
    std::vector<double> avals;  // a(k) = 1 - Dhat(k)
    double eta = 0.0;           // 2 - max_k a(k), the aperiodicity margin
    // min/max of a(k) / (L^2 |k|^2) over grid points with ||k||_inf <= 1/L, k != 0
    double low_ratio_min = 0.0;
    double low_ratio_max = 0.0;

    long size() const {
        long s = 1;
        for (int i = 0; i < d; ++i) s *= M;
        return s;
    }
    std::vector<double> kvec(long idx) const;
};

// Requires M even and M >= 2(2L+1) so the support is alias-free.
FourierGrid fourier_transform(const KernelD& k, int M);

// Inverse transform of the grid values back to weights on [-L, L]^d;
// used to verify the transform round trip.
std::vector<std::pair<std::vector<int>, double>> inverse_transform(const FourierGrid& g, int L);

// n-fold convolution power D^{*n} evaluated at the origin, by direct
// x-space convolution (exact, window grows with n).
double convolution_power_at_origin(const KernelD& k, int n);

enum class TailMode { FourierIntegral, Truncate };

struct GreensSumResult {
    double value = 0.0;           // estimate of sum_{n>=2} D^{*n}(o)
    double error_estimate = 0.0;  // reported uncertainty
    double partial_sum = 0.0;     // truncated x-space sum through n_max
    int n_used = 0;
    double beta_ratio = 0.0;  // value / beta, the measured O(L^{-d}) multiple
};

// Sum_{n=2}^inf D^{*n}(o).  FourierIntegral mode quadratures
// Dhat^2/(1-Dhat) over the dual torus (k=0 excluded) and cross-checks the
// truncated x-space sum; Truncate mode returns the partial sum with a
// geometric tail estimate.  Requesting the infinite sum for d <= 2 throws
// InvariantError (the walk is recurrent, the sum diverges).
GreensSumResult rw_greens_sum(const KernelD& k, int n_max, TailMode mode, int M = 0);

// JSON (de)serialization: {"d":..,"L":..,"entries":[[[off..],mass],...]}
// with lexicographic offset ordering.
std::string kernel_to_json(const KernelD& k);
KernelD kernel_from_json(const std::string& text);

}  // namespace spreadout
