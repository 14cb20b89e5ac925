// model.cpp -- parameter validation and the one-step bond distribution.

#include "spreadout/model.hpp"

#include <algorithm>
#include <cmath>

namespace spreadout {

void validate_params(const ModelParams& p) {
    if (p.eps <= 0.0 || p.eps > 1.0) throw ValidationError("params: eps must lie in (0, 1]");
    if (p.lambda < 0.0) throw ValidationError("params: lambda must be >= 0");
    if (p.n_max < 0) throw ValidationError("params: n_max must be >= 0");
    validate_kernel(p.kernel);
    // ||p_eps||_inf <= 1: both 1-eps <= 1 (automatic) and lambda*eps*sup D <= 1.
    if (p.lambda * p.eps * p.kernel.sup_mass > 1.0 + 1e-15)
        throw ValidationError("params: lambda*eps*sup D exceeds 1, bond probabilities invalid");
    if (p.R < 0) throw ValidationError("params: window radius R must be >= 0");
}

double bond_probability(const ModelParams& p, const std::vector<int>& offset) {
    bool origin = std::all_of(offset.begin(), offset.end(), [](int c) { return c == 0; });
    if (origin) return 1.0 - p.eps;
    return p.lambda * p.eps * p.kernel.mass(offset);
}

std::vector<std::pair<std::vector<int>, double>> step_distribution(const ModelParams& p) {
    std::vector<std::pair<std::vector<int>, double>> out;
    if (p.eps < 1.0) out.emplace_back(std::vector<int>(p.kernel.d, 0), 1.0 - p.eps);
    if (p.lambda > 0.0)
        for (const auto& [x, m] : p.kernel.entries) out.emplace_back(x, p.lambda * p.eps * m);
    std::sort(out.begin(), out.end());
    return out;
}

double step_mass(const ModelParams& p) { return 1.0 - p.eps + p.lambda * p.eps; }

double step_fourier(const ModelParams& p, const std::vector<double>& k) {
    double dhat = 0.0;
    for (const auto& [x, m] : p.kernel.entries) {
        double kx = 0.0;
        for (int i = 0; i < p.kernel.d; ++i) kx += k[i] * x[i];
        dhat += m * std::cos(kx);
    }
    return 1.0 - p.eps + p.lambda * p.eps * dhat;
}

}  // namespace spreadout
