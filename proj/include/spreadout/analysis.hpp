// analysis.hpp -- fits and numerical experiments on top of the core engines:
// Gaussian scaling fits (A, v), moment profiles, the triangle function by two
// routes, susceptibility exponent fits, the continuum (eps -> 0) Cauchy
// study, and the growing-range experiment for d <= 4.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spreadout/field.hpp"
#include "spreadout/lace.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

// Evaluates tauhat at (time slice n, wave vector k); backends: exact fields
// via SpaceTimeField::fourier, walk closed forms, or MC interpolation tables.
using FourierEvaluator = std::function<double(int n, const std::vector<double>& k)>;

// --- Gaussian scaling fit -----------------------------------------------------

struct GaussianFitInput {
    int d = 1;
    double eps = 1.0;
    double sigma2 = 1.0;
    std::vector<int> slices;                  // time slices n used (t = n*eps > 0)
    std::vector<std::vector<double>> probes;  // dimensionless wave vectors khat
    double k_threshold = 0.25;  // use only |khat|^2 / log(2+t) <= threshold
    double v_lo = 0.05;         // bracket for the outer 1-D minimization
    double v_hi = 20.0;
};

// Default probes: multiples (m/4) e_1, m = 1..8.
std::vector<std::vector<double>> default_probes(int d);

struct ScalingFit {
    double A = 1.0;
    double v = 1.0;
    double residual = 0.0;  // RMS residual of the log fit at the optimum
    int points_used = 0;
    std::vector<int> slices;      // slices that contributed
    std::vector<double> A_per_t;  // per-slice estimates at the global fit
    std::vector<double> v_per_t;  // per-slice 1-D refits (drift diagnostics)
    double drift = 0.0;           // max_t |v_per_t - v| (the reported drift)
};

// Joint least squares of log tauhat_t(khat / sqrt(v sigma^2 t)) against
// log A - |khat|^2 / 2d: inner closed-form solve for log A, outer golden
// section over v.  Non-positive tauhat values are skipped; throws
// ValidationError when the remaining data cannot pin both parameters or the
// optimum sits on the v-bracket boundary.
ScalingFit gaussian_fit(const FourierEvaluator& tauhat, const GaussianFitInput& in);

// --- moment profile -------------------------------------------------------------

struct MomentProfile {
    std::vector<double> tau_hat0;      // per slice: sum_x tau
    std::vector<double> second_ratio;  // sum |x|^2 tau / sum tau (0 when empty)
    std::vector<double> sup;           // sup_x tau
    std::vector<double> envelope;      // (1-eps)^n + C2 L^{-d} (1+n eps)^{-d/2}
    double C2 = 0.0;                   // fitted envelope constant
};

MomentProfile moment_profile(const SpaceTimeField& tau, const ModelParams& params);

// --- triangle function ----------------------------------------------------------

struct TriangleEstimate {
    double value = 0.0;       // eps^2 sum_{n<=n_cut} sum_{m<=n} quadrature
    double tail = 0.0;        // power-law extrapolation beyond n_cut (inf if slope >= -1)
    double tail_slope = 0.0;  // fitted decay slope of the per-n contribution
    int n_used = 0;
};

// Fourier route: the quadrature is the dual-grid average of
// tauhat_n(k) tauhat_{n-m}(k) tauhat_m(k); exact (alias-free) when the grid
// size M exceeds three times the spatial support of tau up to n_cut.
TriangleEstimate triangle_estimate(const SpaceTimeField& tau, const FourierGrid& grid, int n_cut);

// x-space oracle: the direct double space sum
// eps^2 sum_{n<=n_cut} sum_{m<=n} sum_{x,y} tau_n(x) tau_{n-m}(y-x) tau_m(y).
double triangle_x_space(const SpaceTimeField& tau, int n_cut);

// --- susceptibility fit ---------------------------------------------------------

struct SusceptibilityFit {
    double C = 1.0;
    double gamma = 1.0;
    double residual = 0.0;            // RMS residual of the log-log fit
    std::vector<double> residuals;    // per-point
};

// Log-log least squares of chi(lambda) = C (lambda_c - lambda)^{-gamma}.
// Throws ValidationError when a grid point touches or exceeds lambda_c, or
// when fewer than two points remain.
SusceptibilityFit susceptibility_fit(const std::vector<double>& lambdas,
                                     const std::vector<double>& chis, double lambda_c);

// --- continuum (eps -> 0) study -------------------------------------------------

using FieldBackend = std::function<SpaceTimeField(const ModelParams&)>;

struct ContinuumStudy {
    std::vector<double> eps_values;  // eps0, eps0/2, ...
    std::vector<double> tau_diffs;   // sup_x |tau_{t;eps} - tau_{t;eps/2}| per halving
    std::vector<double> tau_ratios;  // successive diff ratios
    std::vector<double> pi_diffs;    // same for pi_{t;eps}/eps^2 (when requested)
    std::vector<double> pi_ratios;
    bool cauchy = true;  // all ratios < 1
};

// Compare the time-t slice across halvings eps0 -> eps0/2^halvings on the
// window R of base.  tau_backend produces tau for given params (exact DP,
// forward solve, walk, ...).  Requires t/eps integral at every level.
ContinuumStudy continuum_study(const ModelParams& base, double t, int halvings,
                               const FieldBackend& tau_backend, bool with_pi);

// --- growing-range experiment (d <= 4) ------------------------------------------

// First-order proxy for the critical coupling at a given horizon:
// 1 + sum_{n=2}^{n_max} of the dual-grid average of Dhat(k)^n (the truncated
// probability that two independent D-walks from the origin coincide).
double calibrated_lambda(const KernelD& kernel, int n_max, int M = 128);

struct ScaledRangeConfig {
    int d = 2;
    double b = 1.0;      // range exponent: L_T = round(L1 * T^b)
    double L1 = 1.0;
    double T = 8.0;      // time scale; slices run to T * t, t <= log T
    double lambda = 0.0; // <= 0: auto-calibrate via calibrated_lambda
    long samples = 1000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::vector<double> t_points;  // dimensionless times; default {1/2, 3/4, 1} * log T
    double k_threshold = 0.75;
};

struct ScaledRangeResult {
    int L_T = 1;
    double alpha = 0.0;     // b*d + (d-4)/2, must be > 0
    double sigma2_T = 0.0;  // variance of the rounded kernel
    double beta_T = 0.0;    // L_T^{-d}
    double lambda_used = 0.0;
    int horizon = 0;        // largest slice simulated
    ScalingFit fit;
    std::vector<double> lambda_iter;  // coupling recursion at the available horizon
};

// Builds the kernel at range L_T, Monte Carlo estimates tauhat along the
// first axis, and runs gaussian_fit at slices round(T * t_j).  alpha <= 0 is
// rejected with ValidationError.  extract_pi, when given, drives the
// coupling recursion lambda_n at the available horizon (lambda_iter).
ScaledRangeResult scaled_range_experiment(const ScaledRangeConfig& cfg,
                                          const PiExtractor& extract_pi = nullptr);

}  // namespace spreadout
