// lace.hpp -- the discrete-time renewal recursion linking the two-point
// function tau to the expansion coefficients pi, its triangular inversion,
// random-walk closed forms, and the critical constants (lambda_c, A, v)
// expressed as truncated series in pi.
//
// The recursion, in slice indices (t = n*eps):
//   tau_0 = delta,   tau_n = pi_n + sum_{m=0}^{n-1} (pi_m * p_eps * tau_{n-1-m}),
// where * is spatial convolution and p_eps is the one-step bond distribution.

#pragma once

#include <functional>

#include "spreadout/field.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

// Solve the recursion forward for tau given pi (same window and horizon).
SpaceTimeField forward_solve(const ModelParams& params, const SpaceTimeField& pi);

// Triangular inversion: recover pi from tau.  pi_0 = tau_0, and
//   pi_n = tau_n - sum_{m=0}^{n-1} (pi_m * p_eps * tau_{n-1-m}).
// For a genuine two-point function this yields pi_1 = 0.
SpaceTimeField invert_to_pi(const ModelParams& params, const SpaceTimeField& tau);

// Random walk (pi = delta): tau_n = n-fold convolution power of p_eps.
SpaceTimeField rw_two_point(const ModelParams& params);

// Closed forms for the walk:  tau-hat_n(k) = (1 - eps + lambda*eps*Dhat(k))^n,
// and its continuum limit  exp(-(1 - lambda*Dhat(k)) t).
double rw_fourier(const ModelParams& params, int n, const std::vector<double>& k);
double rw_continuum_fourier(const KernelD& kernel, double lambda, double t,
                            const std::vector<double>& k);

// Both walk closed forms tabulated over every slice and grid point:
// discrete[n][j] = (1 - eps + lambda*eps*Dhat(k_j))^n and
// continuum[n][j] = exp(-(1 - lambda*Dhat(k_j)) * n * eps).
struct RwClosedForm {
    std::vector<std::vector<double>> discrete;   // (n_max+1) x grid.size()
    std::vector<std::vector<double>> continuum;
};
RwClosedForm rw_closed_form(const ModelParams& params, const FourierGrid& grid);

// Truncated-series critical constants evaluated from pi at a given lambda.
// All series run over slices n = 2..n_max (plain sums over the time grid):
//   residual  = 1 - lambda - (1/eps) sum_n pihat_n(0) phat(0)      (0 at lambda_c)
//   A         = (1 + sum_n pihat_n(0)) / denom
//   v         = (lambda - (1/(sigma^2 eps)) sum_n grad2[pihat_n phat](0)) / denom
//   denom     = 1 + sum_n n * pihat_n(0) * phat(0)
// grad2 denotes the Fourier Laplacian at k = 0, computed exactly from second
// moments: grad2[pihat_n phat](0) = -phat(0)*m2(pi_n) - pihat_n(0)*lambda*eps*sigma^2.
// The series are truncated at n_max; `tail_estimate` bounds the dropped part
// of sum_n |pihat_n(0)| by a power-law fit (slope of log sum_x |pi_s| vs
// log s), and `denom` / `denom_margin` report how far the shared denominator
// sits from 0 (InvariantError if within 1e-6).
struct LaceConstants {
    double residual = 0.0;
    double A = 0.0;
    double v = 0.0;
    double pi_sum = 0.0;  // sum_{n>=2} pihat_n(0)
    int n_used = 0;
    double denom = 1.0;          // 1 + sum_n n*pihat_n(0)*phat(0)
    double denom_margin = 1.0;   // |denom| - 1e-6
    double tail_slope = 0.0;     // fitted slope b of log sum_x |pi_s| vs log s
    double tail_estimate = 0.0;  // extrapolated sum_{n > n_max} |pihat_n(0)|
};
LaceConstants lace_constants(const ModelParams& params, const SpaceTimeField& pi);

// Locate lambda_c as the root of the residual by bisection.  extract_pi maps
// a trial lambda to the expansion coefficients at that lambda (the caller
// chooses how: exact inversion, diagram bounds, ...).  Requires a sign change
// of the residual on [lo, hi] (throws ValidationError otherwise).
using PiExtractor = std::function<SpaceTimeField(double lambda)>;

struct CriticalPoint {
    double lambda_c = 0.0;
    double residual = 0.0;  // residual at the returned lambda_c
    int iterations = 0;
    LaceConstants constants;  // evaluated at lambda_c
};
CriticalPoint find_lambda_c(const ModelParams& base, const PiExtractor& extract_pi, double lo,
                            double hi, double tol = 1e-4);

}  // namespace spreadout
