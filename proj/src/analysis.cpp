// analysis.cpp -- scaling fits, triangle estimates, continuum study and the
// growing-range experiment.

#include "spreadout/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spreadout/induction.hpp"
#include "spreadout/simulate.hpp"

namespace spreadout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_norm(const std::vector<double>& k) {
    double s = 0.0;
    for (double c : k) s += c * c;
    return s;
}

// Simple least squares of y = a + b*x; returns (a, b).
std::pair<double, double> linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (det <= 0.0) throw ValidationError("linear fit: degenerate abscissae");
    const double b = (n * sxy - sx * sy) / det;
    return {(sy - b * sx) / n, b};
}

// Power-law tail extrapolation shared by the triangle estimate: fit
// log c_n = log a + b log(1+n) over the given points and integrate beyond
// n_cut; infinite when b >= -1.
std::pair<double, double> power_tail(const std::vector<double>& ns, const std::vector<double>& cs,
                                     int n_cut) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (cs[i] <= 0.0) continue;
        xs.push_back(std::log(1.0 + ns[i]));
        ys.push_back(std::log(cs[i]));
    }
    if (xs.size() < 2) return {0.0, 0.0};
    auto [loga, b] = linear_fit(xs, ys);
    double tail;
    if (b < -1.0)
        tail = std::exp(loga) * std::pow(1.0 + n_cut, b + 1.0) / (-b - 1.0);
    else
        tail = kInf;
    return {tail, b};
}

struct FitPoint {
    int n = 0;
    double t = 0.0;
    double q2 = 0.0;  // |khat|^2
    std::vector<double> khat;
};

// Objective at fixed v: residual sum of squares after the closed-form logA,
// with the contributing values returned for the per-slice diagnostics.
struct Objective {
    const FourierEvaluator& tauhat;
    const GaussianFitInput& in;
    const std::vector<FitPoint>& pts;

    // ys[i] = log tauhat + q2/2d; logA = mean(ys).
    bool values(double v, std::vector<double>& ys) const {
        ys.clear();
        std::vector<double> k(in.d);
        for (const auto& p : pts) {
            const double scale = 1.0 / std::sqrt(v * in.sigma2 * p.t);
            for (int c = 0; c < in.d; ++c) k[c] = p.khat[c] * scale;
            const double val = tauhat(p.n, k);
            if (!(val > 0.0)) return false;
            ys.push_back(std::log(val) + p.q2 / (2.0 * in.d));
        }
        return true;
    }

    double operator()(double v) const {
        std::vector<double> ys;
        if (!values(v, ys) || ys.empty()) return kInf;
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(ys.size());
        double rss = 0.0;
        for (double y : ys) rss += (y - mean) * (y - mean);
        return rss;
    }
};

double golden_minimize(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<std::vector<double>> default_probes(int d) {
    std::vector<std::vector<double>> probes;
    for (int m = 1; m <= 8; ++m) {
        std::vector<double> k(d, 0.0);
        k[0] = 0.25 * m;
        probes.push_back(std::move(k));
    }
    return probes;
}

ScalingFit gaussian_fit(const FourierEvaluator& tauhat, const GaussianFitInput& in) {
    if (in.sigma2 <= 0.0 || in.eps <= 0.0 || in.d < 1)
        throw ValidationError("gaussian_fit: need sigma2 > 0, eps > 0, d >= 1");
    if (!(in.v_lo > 0.0 && in.v_lo < in.v_hi))
        throw ValidationError("gaussian_fit: need 0 < v_lo < v_hi");

    std::vector<FitPoint> pts;
    std::vector<int> used_slices;
    for (int n : in.slices) {
        const double t = n * in.eps;
        if (t <= 0.0) continue;
        bool any = false;
        for (const auto& khat : in.probes) {
            const double q2 = sq_norm(khat);
            if (q2 <= 0.0 || q2 / std::log(2.0 + t) > in.k_threshold) continue;
            pts.push_back({n, t, q2, khat});
            any = true;
        }
        if (any) used_slices.push_back(n);
    }
    // Two parameters need at least two distinct |khat| values.
    double q2_min = kInf, q2_max = -kInf;
    for (const auto& p : pts) {
        q2_min = std::min(q2_min, p.q2);
        q2_max = std::max(q2_max, p.q2);
    }
    if (pts.size() < 2 || !(q2_max > q2_min))
        throw ValidationError("gaussian_fit: ill-conditioned (k-range too small)");

    const Objective obj{tauhat, in, pts};
    const double v = golden_minimize([&](double x) { return obj(x); }, in.v_lo, in.v_hi, 90);
    const double span = in.v_hi - in.v_lo;
    if (v - in.v_lo < 1e-3 * span || in.v_hi - v < 1e-3 * span)
        throw ValidationError("gaussian_fit: optimum at the v-bracket boundary");

    std::vector<double> ys;
    if (!obj.values(v, ys)) throw ValidationError("gaussian_fit: non-positive tauhat at optimum");
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());

    ScalingFit fit;
    fit.v = v;
    fit.A = std::exp(mean);
    fit.points_used = static_cast<int>(pts.size());
    fit.slices = used_slices;
    double rss = 0.0;
    for (double y : ys) rss += (y - mean) * (y - mean);
    fit.residual = std::sqrt(rss / static_cast<double>(ys.size()));

    for (int n : used_slices) {
        // Per-slice A at the global v.
        double m_t = 0.0;
        int c_t = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i].n == n) {
                m_t += ys[i];
                ++c_t;
            }
        fit.A_per_t.push_back(std::exp(m_t / c_t));
        // Per-slice v by a restricted 1-D refit (drift diagnostic).
        std::vector<FitPoint> sub;
        for (const auto& p : pts)
            if (p.n == n) sub.push_back(p);
        const Objective sub_obj{tauhat, in, sub};
        fit.v_per_t.push_back(
            golden_minimize([&](double x) { return sub_obj(x); }, in.v_lo, in.v_hi, 90));
        fit.drift = std::max(fit.drift, std::abs(fit.v_per_t.back() - v));
    }
    return fit;
}

MomentProfile moment_profile(const SpaceTimeField& tau, const ModelParams& params) {
    MomentProfile out;
    const double Ld = std::pow(static_cast<double>(params.kernel.L), params.kernel.d);
    double swz = 0.0, sww = 0.0;
    for (int n = 0; n <= tau.n_max; ++n) {
        const double mass = tau.slice_sum(n);
        out.tau_hat0.push_back(mass);
        out.second_ratio.push_back(mass != 0.0 ? tau.second_moment(n) / mass : 0.0);
        out.sup.push_back(tau.slice_sup(n));
        if (n >= 1) {
            const double base = std::pow(1.0 - params.eps, n);
            const double w = (1.0 / Ld) * std::pow(1.0 + n * params.eps, -0.5 * params.kernel.d);
            swz += w * (out.sup.back() - base);
            sww += w * w;
        }
    }
    out.C2 = sww > 0.0 ? swz / sww : 0.0;
    for (int n = 0; n <= tau.n_max; ++n) {
        const double w = (1.0 / Ld) * std::pow(1.0 + n * params.eps, -0.5 * params.kernel.d);
        out.envelope.push_back(std::pow(1.0 - params.eps, n) + out.C2 * w);
    }
    return out;
}

TriangleEstimate triangle_estimate(const SpaceTimeField& tau, const FourierGrid& grid,
                                   int n_cut) {
    if (n_cut < 0 || n_cut > tau.n_max)
        throw ValidationError("triangle_estimate: n_cut out of range");
    if (grid.d != tau.d) throw ValidationError("triangle_estimate: grid dimension mismatch");
    const long K = grid.size();
    std::vector<std::vector<double>> fhat(n_cut + 1, std::vector<double>(K, 0.0));
    for (int n = 0; n <= n_cut; ++n)
        for (long j = 0; j < K; ++j) fhat[n][j] = tau.fourier(n, grid.kvec(j));

    TriangleEstimate out;
    out.n_used = n_cut;
    const double e2 = tau.eps * tau.eps;
    std::vector<double> ns, cs;
    for (int n = 0; n <= n_cut; ++n) {
        double contrib = 0.0;
        for (int m = 0; m <= n; ++m) {
            double quad = 0.0;
            for (long j = 0; j < K; ++j) quad += fhat[n][j] * fhat[n - m][j] * fhat[m][j];
            contrib += quad / static_cast<double>(K);
        }
        contrib *= e2;
        out.value += contrib;
        ns.push_back(static_cast<double>(n));
        cs.push_back(contrib);
    }
    // Tail from the decay of the upper half of the per-n contributions.
    const std::size_t half = ns.size() / 2;
    std::tie(out.tail, out.tail_slope) =
        power_tail({ns.begin() + half, ns.end()}, {cs.begin() + half, cs.end()}, n_cut);
    return out;
}

double triangle_x_space(const SpaceTimeField& tau, int n_cut) {
    if (n_cut < 0 || n_cut > tau.n_max)
        throw ValidationError("triangle_x_space: n_cut out of range");
    const Box box = tau.box();
    const long S = box.size();
    std::vector<int> x(tau.d), y(tau.d), ymx(tau.d);
    double total = 0.0;
    for (int n = 0; n <= n_cut; ++n)
        for (int m = 0; m <= n; ++m) {
            double sum = 0.0;
            for (long i = 0; i < S; ++i) {
                const double tx = tau.at(n, i);
                if (tx == 0.0) continue;
                box.coords(i, x.data());
                for (long j = 0; j < S; ++j) {
                    const double ty = tau.at(m, j);
                    if (ty == 0.0) continue;
                    box.coords(j, y.data());
                    for (int c = 0; c < tau.d; ++c) ymx[c] = y[c] - x[c];
                    sum += tx * ty * tau.value(n - m, ymx);
                }
            }
            total += sum;
        }
    return total * tau.eps * tau.eps;
}

SusceptibilityFit susceptibility_fit(const std::vector<double>& lambdas,
                                     const std::vector<double>& chis, double lambda_c) {
    if (lambdas.size() != chis.size() || lambdas.size() < 2)
        throw ValidationError("susceptibility_fit: need >= 2 (lambda, chi) pairs");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] >= lambda_c - 1e-12)
            throw ValidationError("susceptibility_fit: lambda grid touches lambda_c");
        if (chis[i] <= 0.0) throw ValidationError("susceptibility_fit: chi must be positive");
        xs.push_back(std::log(lambda_c - lambdas[i]));
        ys.push_back(std::log(chis[i]));
    }
    auto [logc, slope] = linear_fit(xs, ys);
    SusceptibilityFit fit;
    fit.C = std::exp(logc);
    fit.gamma = -slope;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (logc + slope * xs[i]);
        fit.residuals.push_back(r);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(xs.size()));
    return fit;
}

ContinuumStudy continuum_study(const ModelParams& base, double t, int halvings,
                               const FieldBackend& tau_backend, bool with_pi) {
    if (halvings < 1) throw ValidationError("continuum_study: need >= 1 halving");
    ContinuumStudy out;
    std::vector<SpaceTimeField> taus, pis;
    double eps = base.eps;
    for (int i = 0; i <= halvings; ++i, eps *= 0.5) {
        const double steps = t / eps;
        const int n = static_cast<int>(std::lround(steps));
        if (std::abs(steps - n) > 1e-9)
            throw ValidationError("continuum_study: t/eps must be an integer at every level");
        ModelParams p = base;
        p.eps = eps;
        p.n_max = n;
        out.eps_values.push_back(eps);
        taus.push_back(tau_backend(p));
        if (with_pi) pis.push_back(invert_to_pi(p, taus.back()));
    }
    const long S = Box{base.kernel.d, base.R}.size();
    auto slice_diff = [&](const SpaceTimeField& a, int na, const SpaceTimeField& b, int nb,
                          double ca, double cb) {
        double worst = 0.0;
        for (long s = 0; s < S; ++s)
            worst = std::max(worst, std::abs(ca * a.at(na, s) - cb * b.at(nb, s)));
        return worst;
    };
    for (int i = 0; i < halvings; ++i) {
        const int na = taus[i].n_max, nb = taus[i + 1].n_max;
        out.tau_diffs.push_back(slice_diff(taus[i], na, taus[i + 1], nb, 1.0, 1.0));
        if (with_pi) {
            const double ca = 1.0 / (out.eps_values[i] * out.eps_values[i]);
            const double cb = 1.0 / (out.eps_values[i + 1] * out.eps_values[i + 1]);
            out.pi_diffs.push_back(slice_diff(pis[i], na, pis[i + 1], nb, ca, cb));
        }
    }
    for (int i = 0; i + 1 < halvings; ++i) {
        out.tau_ratios.push_back(out.tau_diffs[i] > 0.0 ? out.tau_diffs[i + 1] / out.tau_diffs[i]
                                                        : 0.0);
        if (with_pi)
            out.pi_ratios.push_back(out.pi_diffs[i] > 0.0 ? out.pi_diffs[i + 1] / out.pi_diffs[i]
                                                          : 0.0);
        if (out.tau_ratios.back() >= 1.0) out.cauchy = false;
        if (with_pi && out.pi_ratios.back() >= 1.0) out.cauchy = false;
    }
    return out;
}

double calibrated_lambda(const KernelD& kernel, int n_max, int M) {
    const FourierGrid grid = fourier_transform(kernel, M);
    double total = 0.0;
    for (long j = 0; j < grid.size(); ++j) {
        const double dh = grid.dhat[j];
        double p = dh * dh, s = 0.0;
        for (int n = 2; n <= n_max; ++n) {
            s += p;
            p *= dh;
        }
        total += s;
    }
    return 1.0 + total / static_cast<double>(grid.size());
}

ScaledRangeResult scaled_range_experiment(const ScaledRangeConfig& cfg,
                                          const PiExtractor& extract_pi) {
    if (cfg.d < 1 || cfg.d > 4)
        throw ValidationError("scaled_range_experiment: designed for d <= 4");
    ScaledRangeResult out;
    out.alpha = cfg.b * cfg.d + 0.5 * (cfg.d - 4.0);
    if (out.alpha <= 0.0)
        throw ValidationError("scaled_range_experiment: alpha = b*d + (d-4)/2 must be > 0");
    if (cfg.T <= 1.0) throw ValidationError("scaled_range_experiment: need T > 1");

    out.L_T = std::max(1, static_cast<int>(std::lround(cfg.L1 * std::pow(cfg.T, cfg.b))));
    KernelD kernel = make_uniform_kernel(cfg.d, out.L_T);
    out.sigma2_T = kernel_moments(kernel).sigma2;
    out.beta_T = kernel.beta;

    const double log_t = std::log(cfg.T);
    std::vector<double> t_points = cfg.t_points;
    if (t_points.empty()) t_points = {0.5 * log_t, 0.75 * log_t, log_t};
    std::vector<int> slices;
    for (double tp : t_points) {
        if (tp <= 0.0 || tp > log_t + 1e-12)
            throw ValidationError("scaled_range_experiment: t points must lie in (0, log T]");
        const int n = std::max(1, static_cast<int>(std::lround(cfg.T * tp)));
        if (slices.empty() || slices.back() != n) slices.push_back(n);
    }
    out.horizon = slices.back();

    ModelParams params;
    params.kernel = kernel;
    params.eps = 1.0;
    params.lambda =
        cfg.lambda > 0.0 ? cfg.lambda : calibrated_lambda(kernel, out.horizon);
    out.lambda_used = params.lambda;
    params.n_max = out.horizon;
    params.R = out.L_T * out.horizon;

    // Monte Carlo tauhat on a table of |k| magnitudes along the first axis;
    // the fit interpolates linearly in |k| per slice.
    GaussianFitInput in;
    in.d = cfg.d;
    in.eps = 1.0;
    in.sigma2 = out.sigma2_T;
    in.slices = slices;
    in.probes = default_probes(cfg.d);
    in.k_threshold = cfg.k_threshold;
    double kappa_max = 0.0;
    for (const auto& p : in.probes) kappa_max = std::max(kappa_max, std::sqrt(sq_norm(p)));
    kappa_max /= std::sqrt(in.v_lo * out.sigma2_T * slices.front());

    const int table_n = 48;
    std::vector<std::vector<double>> ks;
    for (int i = 0; i <= table_n; ++i) {
        std::vector<double> k(cfg.d, 0.0);
        k[0] = kappa_max * i / table_n;
        ks.push_back(std::move(k));
    }
    const auto table =
        estimate_fourier(params, slices, ks, cfg.samples, cfg.seed, cfg.threads);

    FourierEvaluator tauhat = [=](int n, const std::vector<double>& k) {
        const double kappa = std::sqrt(sq_norm(k));
        std::size_t row = 0;
        while (row < slices.size() && slices[row] != n) ++row;
        if (row == slices.size() || kappa > kappa_max) return 0.0;
        const double pos = kappa / kappa_max * table_n;
        const int i0 = std::min(static_cast<int>(pos), table_n - 1);
        const double w = pos - i0;
        return (1.0 - w) * table[row][i0] + w * table[row][i0 + 1];
    };
    out.fit = gaussian_fit(tauhat, in);

    if (extract_pi) {
        ModelParams base = params;
        base.n_max = out.horizon;
        out.lambda_iter = lambda_sequence(base, extract_pi, out.horizon);
    }
    return out;
}

}  // namespace spreadout
