// exact.hpp -- exact small-instance oracles, independent of the Monte Carlo
// engine and of the recursion code:
//   * a subset-distribution Markov chain giving tau exactly (state = occupied
//     set of one time slice, evolved as an explicit measure on 2^sites), and
//   * brute-force enumeration over all bond configurations, giving tau and
//     the double-connection / single-cutting-bond functions by evaluating
//     their defining events literally on each configuration.

#pragma once

#include "spreadout/field.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

// A one-step oriented bond with positive occupation probability, between
// space-time nodes n*S + site (S = window cell count).
struct EnumeratedBond {
    long from = 0;  // node at slice n
    long to = 0;    // node at slice n+1
    double p = 0.0;
};

// All positive-probability bonds inside the cone reachable from the origin
// within the horizon, sorted by source slice.
std::vector<EnumeratedBond> enumerate_bonds(const ModelParams& params);

// Bond count of enumerate_bonds without materializing it.
long count_positive_bonds(const ModelParams& params);

// Exact tau via the slice-distribution Markov chain.  Maintains the full
// probability vector over subsets of the window and pushes it forward one
// slice at a time; tau_n(x) = P(x occupied at slice n).  Requires the window
// to have at most v_cap cells (throws CapError otherwise).
SpaceTimeField exact_two_point_dp(const ModelParams& params, int v_cap = 20);

// Exact tau by summing over all 2^B bond configurations (B <= b_cap, else
// CapError; also requires at most 64 space-time nodes in the cone).
SpaceTimeField brute_force_two_point(const ModelParams& params, int b_cap = 24);

// Exact expansion coefficient of order N (N in {0, 1}) by literal event
// evaluation per bond configuration:
//   N = 0: P(origin doubly connected to (x, n)); equals 1 at the origin slice.
//   N = 1: sum over bonds b of P({origin doubly connected to the bottom of b}
//          and the no-earlier-cutting-bond event at the top of b, taken
//          through the cluster of the origin with b removed).
// Same caps as brute_force_two_point.
SpaceTimeField brute_force_piN(const ModelParams& params, int N, int b_cap = 24);

}  // namespace spreadout
