// induction.hpp -- the inductive-method quantities and hypothesis checks.
//
// From a model and its two-point function tau / expansion coefficients pi the
// module builds the Fourier-side sequences
//   f_n(k) = tauhat_{n eps}(k),   e_n(k) = pihat_{n eps}(k),
//   g_n(k) = pihat_{(n-1) eps}(k) * phat_eps(k),
// the recursively defined couplings lambda_n, the velocity sequence v_n, the
// per-step remainders r_l(k) with f_m(k) = prod_{l<=m} (1 - eps v_l a(k)
// + eps r_l(k)) exact by construction, and evaluates the four induction
// hypotheses H1-H4 with configurable constants, reporting margins.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spreadout/field.hpp"
#include "spreadout/lace.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

// Diagnostic constants and exponents.  The ratio reading of the "much
// greater" chain K3 >> K1 >> K4 >> 1, K2, K5 >> K4 is ratio >= 10.
// Exponent admissibility:
//   d > 4:   -(2+rho) < 0 < d/2-(2+rho) < gamma < gamma+delta
//            < min(1, Delta, (d-4)/2)
//   d <= 4:  same head of the chain, but gamma+delta < min(omega, Delta)
//            with omega in (delta, 1); beta_hat replaces the kernel beta.
struct InductionConstants {
    double K1 = 100.0;
    double K2 = 1000.0;
    double K3 = 1000.0;
    double K4 = 10.0;
    double K5 = 1000.0;
    double gamma = 0.3;
    double delta = 0.1;
    double rho = 0.25;
    double Delta = 1.0;
    bool low_dim = false;   // d <= 4 mode: modified exponents, beta_hat
    double omega = 0.9;
    double beta_hat = 0.0;  // smallness parameter in low-dim mode (> 0)
};

// Defaults per dimension: d > 4 uses rho = 0.25; d <= 4 switches to low-dim
// mode with rho = d/2 - 2.25 (keeping d/2 - (2+rho) = 0.25) and omega = 0.9.
InductionConstants default_constants(int d);

// Throws ValidationError on any violated ratio or exponent-chain relation.
void validate_constants(const InductionConstants& c, int d);

struct InductionState {
    int d = 1;
    double eps = 1.0;
    double lambda = 1.0;
    double sigma2 = 0.0;
    double beta = 1.0;  // effective smallness: kernel beta, or beta_hat
    int n_max = 0;
    InductionConstants consts;

    std::vector<std::vector<double>> ks;  // grid points
    std::vector<double> avals;            // a(k) = 1 - Dhat(k)

    // Sequences indexed [n][k-grid index]; scalar companions at k = 0.
    std::vector<std::vector<double>> f;  // n = 0..n_max
    std::vector<double> f0;
    std::vector<std::vector<double>> e;  // n = 0..n_max
    std::vector<std::vector<double>> g;  // n = 1..n_max (index 0 unused)
    std::vector<double> g0;
    std::vector<double> grad2_g;  // grad2 g_n(0), exact second moments

    std::vector<double> lambda_n;  // filled by the caller / builders
    std::vector<double> v_n;       // filled by v_and_r_sequences
    std::vector<std::vector<double>> r;  // l = 1..n_max (index 0 unused)
    std::vector<double> r0;
    std::vector<std::vector<double>> s;  // s_l(k) decomposition

    // Grid points where f_{l-1}(k) = 0 (r_l undefined there): (l, k-index).
    std::vector<std::pair<int, long>> excluded;

    bool is_excluded(int l, long j) const;
};

// Build the state from exact or MC fields tau, pi on the window of params.
InductionState make_induction_state(const ModelParams& params, const SpaceTimeField& tau,
                                    const SpaceTimeField& pi, const FourierGrid& grid,
                                    const InductionConstants& consts);

// Closed-form random-walk state (pi = delta at time 0): f_n = phat^n,
// g_l = 0 for l >= 2, lambda_n = 1 for all n.  Any dimension, no fields.
InductionState make_rw_induction_state(const ModelParams& params, const FourierGrid& grid,
                                       const InductionConstants& consts);

// lambda_0 = lambda_1 = 1; lambda_n = 1 - (1/eps) sum_{l=2}^n g_l(0) with
// every g_l(0) evaluated from pi extracted at lambda_{n-1}.  Extractions are
// cached per trial lambda.  Requires base.n_max >= n_max - 1 so the needed
// pi slices exist.
std::vector<double> lambda_sequence(const ModelParams& base, const PiExtractor& extract_pi,
                                    int n_max);

// Fill v_n (v_0 = v_1 = lambda, then the quotient formula with grad2 g from
// exact second moments), the remainders r_l(k) = [f_l/f_{l-1} - 1
// + eps v_l a(k)]/eps with r_1 = lambda - 1, and the s_l decomposition
//   s_l(k) = [eps v_l r_l(0) a(k) + (r_l(k) - r_l(0))] / (1 + eps r_l(0)).
// Grid points with vanishing f_{l-1} are excluded and reported in the state.
void v_and_r_sequences(InductionState& st);

// max_k |prod_{l<=m}(1 - eps v_l a(k) + eps r_l(k)) - f_m(k)| over
// non-excluded points (exact by construction of r, so ~1e-16 in practice).
double reconstruction_error(const InductionState& st, int m);

// |prod_{l<=m}(1 + eps r_l(0)) - f_m(0)|.
double f0_product_error(const InductionState& st, int m);

// Membership in A_m = {k : a(k) <= gamma log(2+m eps)/(1+m eps)}.
bool in_Am(const InductionState& st, double a, int m);

// One row per (m, hypothesis): the worst inequality instance under that
// hypothesis at step m.  k_index = -1 when no grid point is involved
// (H1/H2) or the relevant region is empty.
struct HypothesisEntry {
    int m = 0;
    int hypothesis = 0;  // 1..4
    long k_index = -1;
    double left = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - |left|; +inf when vacuous
};

struct HypothesisReport {
    std::vector<HypothesisEntry> entries;  // 4 per m, m = 1..n
    bool all_pass = true;
    double worst_margin = 0.0;
    int worst_m = -1;
    int worst_hypothesis = 0;
    bool h1_margins_nonneg = true;
    bool intervals_nested = true;  // I_0 superset I_1 superset ... I_n
};

// Evaluate H1-H4 for m = 1..n with the state's constants:
//   H1: |lambda_m - lambda_{m-1}| <= eps K1 beta/(1+m eps)^{d/2}
//   H2: |v_m - v_{m-1}|           <= eps K2 beta/(1+m eps)^{(d-2)/2}
//   H3 (k in A_m, l <= m): |r_l(0)| <= K3 beta/(1+l eps)^{(d-2)/2} and
//       |r_l(k)-r_l(0)| <= K3 beta a(k)/(1+l eps)^{delta}
//   H4 (k not in A_m): |f_m(k)| <= K4 a(k)^{-2-rho}/(1+m eps)^{d/2} and
//       |f_m - f_{m-1}| <= eps K5 a(k)^{-1-rho}/(1+m eps)^{d/2}
// Low-dim mode substitutes beta_hat for beta and the decay powers
// (2+omega), (1+omega) in H1/H2, and (1+omega) for (d-2)/2 in H3.
// Violations are reported through margins, never thrown.
HypothesisReport check_hypotheses(const InductionState& st, int n);

// CSV with header m,hypothesis,k_index,left,bound,margin.
std::string report_to_csv(const HypothesisReport& report);

}  // namespace spreadout
