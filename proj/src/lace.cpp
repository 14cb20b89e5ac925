// lace.cpp -- renewal recursion, inversion, walk closed forms and the
// truncated-series critical constants.

#include "spreadout/lace.hpp"

#include <cmath>
#include <limits>

namespace spreadout {

namespace {

void check_window(const ModelParams& params, const SpaceTimeField& f, const char* what) {
    if (f.d != params.kernel.d || f.n_max != params.n_max || f.R != params.R)
        throw ValidationError(std::string(what) + ": field window does not match params");
}

// out[x] += coeff * sum_y a[y] b[x - y] over one slice, dropping terms that
// land outside the window.
void dense_convolve_add(const Box& box, const double* a, const double* b, double coeff,
                        double* out) {
    const long S = box.size();
    std::vector<int> ya(box.d), zb(box.d), x(box.d);
    for (long i = 0; i < S; ++i) {
        if (a[i] == 0.0) continue;
        box.coords(i, ya.data());
        for (long j = 0; j < S; ++j) {
            if (b[j] == 0.0) continue;
            box.coords(j, zb.data());
            bool ok = true;
            for (int c = 0; c < box.d; ++c) {
                x[c] = ya[c] + zb[c];
                if (x[c] < -box.R || x[c] > box.R) ok = false;
            }
            if (ok) out[box.index(x.data())] += coeff * a[i] * b[j];
        }
    }
}

}  // namespace

SpaceTimeField forward_solve(const ModelParams& params, const SpaceTimeField& pi) {
    validate_params(params);
    check_window(params, pi, "forward_solve");
    const Box box = pi.box();
    const long S = box.size();
    const auto step = step_distribution(params);

    SpaceTimeField tau = SpaceTimeField::zeros(box.d, params.eps, params.n_max, params.R);
    // pstar[m] = (pi_m * p_eps), built once per slice as it becomes needed.
    std::vector<std::vector<double>> pstar(params.n_max + 1);
    for (int n = 0; n <= params.n_max; ++n) {
        double* tn = &tau.at(n, 0);
        for (long s = 0; s < S; ++s) tn[s] = pi.at(n, s);
        for (int m = 0; m < n; ++m) {
            if (pstar[m].empty()) {
                pstar[m].assign(S, 0.0);
                convolve_slice_add(box, &pi.at(m, 0), step, 1.0, pstar[m].data());
            }
            dense_convolve_add(box, pstar[m].data(), &tau.at(n - 1 - m, 0), 1.0, tn);
        }
    }
    return tau;
}

SpaceTimeField invert_to_pi(const ModelParams& params, const SpaceTimeField& tau) {
    validate_params(params);
    check_window(params, tau, "invert_to_pi");
    const Box box = tau.box();
    const long S = box.size();
    const auto step = step_distribution(params);

    SpaceTimeField pi = SpaceTimeField::zeros(box.d, params.eps, params.n_max, params.R);
    std::vector<std::vector<double>> pstar(params.n_max + 1);
    std::vector<double> acc(S);
    for (int n = 0; n <= params.n_max; ++n) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int m = 0; m < n; ++m) {
            if (pstar[m].empty()) {
                pstar[m].assign(S, 0.0);
                convolve_slice_add(box, &pi.at(m, 0), step, 1.0, pstar[m].data());
            }
            dense_convolve_add(box, pstar[m].data(), &tau.at(n - 1 - m, 0), 1.0, acc.data());
        }
        for (long s = 0; s < S; ++s) pi.at(n, s) = tau.at(n, s) - acc[s];
    }
    return pi;
}

SpaceTimeField rw_two_point(const ModelParams& params) {
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const auto step = step_distribution(params);
    SpaceTimeField tau = SpaceTimeField::delta(box.d, params.eps, params.n_max, params.R);
    for (int n = 1; n <= params.n_max; ++n)
        convolve_slice_add(box, &tau.at(n - 1, 0), step, 1.0, &tau.at(n, 0));
    return tau;
}

double rw_fourier(const ModelParams& params, int n, const std::vector<double>& k) {
    return std::pow(step_fourier(params, k), n);
}

double rw_continuum_fourier(const KernelD& kernel, double lambda, double t,
                            const std::vector<double>& k) {
    double dhat = 0.0;
    for (const auto& [x, m] : kernel.entries) {
        double kx = 0.0;
        for (int i = 0; i < kernel.d; ++i) kx += k[i] * x[i];
        dhat += m * std::cos(kx);
    }
    return std::exp(-(1.0 - lambda * dhat) * t);
}

RwClosedForm rw_closed_form(const ModelParams& params, const FourierGrid& grid) {
    validate_params(params);
    if (grid.d != params.kernel.d)
        throw ValidationError("rw_closed_form: grid dimension does not match params");
    const long K = grid.size();
    RwClosedForm out;
    out.discrete.assign(params.n_max + 1, std::vector<double>(K, 1.0));
    out.continuum.assign(params.n_max + 1, std::vector<double>(K, 1.0));
    for (long j = 0; j < K; ++j) {
        const double phat = 1.0 - params.eps + params.lambda * params.eps * grid.dhat[j];
        const double rate = 1.0 - params.lambda * grid.dhat[j];
        for (int n = 1; n <= params.n_max; ++n) {
            out.discrete[n][j] = out.discrete[n - 1][j] * phat;
            out.continuum[n][j] = std::exp(-rate * static_cast<double>(n) * params.eps);
        }
    }
    return out;
}

LaceConstants lace_constants(const ModelParams& params, const SpaceTimeField& pi) {
    validate_params(params);
    check_window(params, pi, "lace_constants");
    const double phat0 = step_mass(params);
    const double sigma2 = kernel_moments(params.kernel).sigma2;

    double pi_sum = 0.0, weighted_sum = 0.0, grad2_sum = 0.0;
    for (int n = 2; n <= params.n_max; ++n) {
        const double pihat0 = pi.slice_sum(n);
        const double m2 = pi.second_moment(n);
        pi_sum += pihat0;
        weighted_sum += static_cast<double>(n) * pihat0 * phat0;
        // grad2[pihat_n * phat](0), exact via second moments.
        grad2_sum += -phat0 * m2 - pihat0 * params.lambda * params.eps * sigma2;
    }
    LaceConstants out;
    out.pi_sum = pi_sum;
    out.n_used = params.n_max;
    out.residual = 1.0 - params.lambda - (1.0 / params.eps) * pi_sum * phat0;
    const double denom = 1.0 + weighted_sum;
    out.denom = denom;
    out.denom_margin = std::abs(denom) - 1e-6;
    if (out.denom_margin <= 0.0)
        throw InvariantError("lace_constants: series denominator within 1e-6 of 0");
    out.A = (1.0 + pi_sum) / denom;
    out.v = (params.lambda - grad2_sum / (sigma2 * params.eps)) / denom;

    // Power-law fit of log sum_x |pi_s| vs log s over s >= 2 bounds the
    // truncated tail of sum_n |pihat_n(0)| by an integral extrapolation.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int pts = 0;
    for (int n = 2; n <= params.n_max; ++n) {
        const double abs_sum = pi.slice_abs_sum(n);
        if (abs_sum <= 0.0) continue;
        const double x = std::log(static_cast<double>(n)), y = std::log(abs_sum);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++pts;
    }
    if (pts >= 2 && sxx * pts - sx * sx > 0.0) {
        const double b = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
        const double loga = (sy - b * sx) / pts;
        out.tail_slope = b;
        if (b < -1.0) {
            const double nm = static_cast<double>(params.n_max);
            out.tail_estimate = std::exp(loga) * std::pow(nm, b + 1.0) / (-b - 1.0);
        } else {
            out.tail_estimate = std::numeric_limits<double>::infinity();
        }
    }
    return out;
}

CriticalPoint find_lambda_c(const ModelParams& base, const PiExtractor& extract_pi, double lo,
                            double hi, double tol) {
    if (!(lo < hi) || tol <= 0.0) throw ValidationError("find_lambda_c: need lo < hi, tol > 0");
    auto residual_at = [&](double lambda) {
        ModelParams p = base;
        p.lambda = lambda;
        return lace_constants(p, extract_pi(lambda)).residual;
    };
    double rlo = residual_at(lo), rhi = residual_at(hi);
    if (!(rlo > 0.0) || !(rhi < 0.0))
        throw ValidationError("find_lambda_c: residual does not change sign on [lo, hi]");
    CriticalPoint cp;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double rm = residual_at(mid);
        ++cp.iterations;
        if (rm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    cp.lambda_c = 0.5 * (lo + hi);
    ModelParams p = base;
    p.lambda = cp.lambda_c;
    cp.constants = lace_constants(p, extract_pi(cp.lambda_c));
    cp.residual = cp.constants.residual;
    return cp;
}

}  // namespace spreadout
