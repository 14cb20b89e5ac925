// model.hpp -- model parameters of the discretized contact process on
// Z^d x (eps Z_+): kernel D, time step eps, infection rate lambda, horizon
// and window, with the derived bond probabilities
//   p_eps(0) = 1 - eps  (temporal bond),  p_eps(y) = lambda*eps*D(y)  (spatial).

#pragma once

#include "spreadout/kernel.hpp"

namespace spreadout {

struct ModelParams {
    KernelD kernel;
    double eps = 1.0;    // in (0, 1]
    double lambda = 1.0; // >= 0
    int n_max = 0;       // horizon in units of eps
    int R = 0;           // window half-width
};

// Throws ValidationError unless eps in (0,1], lambda >= 0, ||p_eps||_inf <= 1
// and R >= 0.  R >= L * n_max guarantees exact truncation (no mass can reach
// the boundary); operations that require it check locally, everything else
// treats the window itself as the (confined) model.
void validate_params(const ModelParams& p);

// Bond occupation probability as a function of the spatial offset of a
// one-step bond: 1-eps at offset 0, lambda*eps*D(offset) otherwise.
double bond_probability(const ModelParams& p, const std::vector<int>& offset);

// The one-step distribution p_eps as (offset, probability) pairs with
// positive probability only (the temporal entry is dropped when eps = 1).
std::vector<std::pair<std::vector<int>, double>> step_distribution(const ModelParams& p);

// phat_eps(0) = 1 - eps + lambda*eps.
double step_mass(const ModelParams& p);

// phat_eps(k) = 1 - eps + lambda*eps*Dhat(k).
double step_fourier(const ModelParams& p, const std::vector<double>& k);

}  // namespace spreadout
