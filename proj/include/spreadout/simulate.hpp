// simulate.hpp -- Monte Carlo engine for the discretized contact process.
//
// Clusters grow by the frontier Markov chain: given the occupied set C_n,
// each site x joins C_{n+1} independently with probability
//   q_x(C_n) = 1 - prod_{y in C_n} (1 - p_eps(x - y)).
// Replicas use a counter-based generator keyed on (seed, replica, slice,
// site), so runs are deterministic, order-independent and couple
// monotonically across lambda through shared uniforms.

#pragma once

#include <cstdint>
#include <vector>

#include "spreadout/field.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

// --- counter-based RNG -----------------------------------------------------

// Stateless 64-bit mixer (splitmix64 finalizer); combining values with mix()
// derives independent streams.
std::uint64_t rng_mix(std::uint64_t a, std::uint64_t b);
// Uniform in [0, 1) from a mixed counter value.
double rng_uniform(std::uint64_t h);

// --- cluster growth ----------------------------------------------------------

struct ClusterTrace {
    // slices[n] = occupied offsets at time n*eps, each offset of length d.
    std::vector<std::vector<std::vector<int>>> slices;
    int extinction_time = -1;  // first n with empty slice, or -1 if alive at horizon
};

// Deterministic given (params, stream).  Use stream = rng_mix(seed, replica).
ClusterTrace run_cluster(const ModelParams& params, std::uint64_t stream);

// --- estimators ---------------------------------------------------------------

struct SliceStats {
    double tau_hat0 = 0.0;       // estimated sum_x tau_n(x)
    double second_moment = 0.0;  // estimated sum_x |x|^2 tau_n(x)
    double sup = 0.0;            // estimated sup_x tau_n(x)
};

struct EstimatorResult {
    SpaceTimeField mean;
    SpaceTimeField stderr_;  // sample std / sqrt(samples), entrywise
    long samples = 0;
    std::uint64_t seed = 0;
    std::vector<SliceStats> per_slice;
    double susceptibility_partial = 0.0;  // eps * sum_n tau_hat0(n)
};

// Entry (x, n) estimates tau_{n eps}(x) = P((o,0) -> (x, n eps)).
EstimatorResult estimate_two_point(const ModelParams& params, long samples,
                                   std::uint64_t seed, int threads = 0);

// Entry (x, n) estimates P((o,0) => (x, n eps)): at least two bond-disjoint
// occupied paths, decided per replica by unit-capacity max-flow (>= 2).
// Bonds are materialized explicitly since disjointness needs bond identity.
EstimatorResult estimate_pi0(const ModelParams& params, long samples,
                             std::uint64_t seed, int threads = 0);

// Pooled estimate; means combine by exact sample-weighted average.
EstimatorResult merge_estimates(const EstimatorResult& a, const EstimatorResult& b);

// Monte Carlo estimate of tau-hat at chosen (slice, wave vector) pairs:
// result[i][j] = mean over replicas of sum_{x in C_{n_i}} cos(k_j . x).
// Cheap for large windows because no dense field is accumulated.
std::vector<std::vector<double>> estimate_fourier(const ModelParams& params,
                                                  const std::vector<int>& slices,
                                                  const std::vector<std::vector<double>>& ks,
                                                  long samples, std::uint64_t seed,
                                                  int threads = 0);

}  // namespace spreadout
