// induction.cpp -- inductive sequences lambda_n, v_n, r_l(k) and the H1-H4
// hypothesis checks with margins.

#include "spreadout/induction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace spreadout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// f_{l-1}(k) below this is treated as vanishing: the ratio r_l would be pure
// roundoff amplification (the factor 1 - eps v a + eps r cancels at scale
// max(1, |r|) while the true value sits at roundoff scale).
constexpr double kVanishTol = 1e-10;

void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
}

}  // namespace

InductionConstants default_constants(int d) {
    InductionConstants c;
    if (d <= 4) {
        c.low_dim = true;
        c.rho = 0.5 * d - 2.25;
        c.beta_hat = 0.1;
    }
    return c;
}

void validate_constants(const InductionConstants& c, int d) {
    require(c.K4 >= 10.0, "constants: need K4 >= 10 (K4 >> 1)");
    require(c.K1 >= 10.0 * c.K4, "constants: need K1 >= 10*K4");
    require(c.K3 >= 10.0 * c.K1, "constants: need K3 >= 10*K1");
    require(c.K2 >= 10.0 * c.K4, "constants: need K2 >= 10*K4");
    require(c.K5 >= 10.0 * c.K4, "constants: need K5 >= 10*K4");
    require(c.rho > -2.0, "constants: need -(2+rho) < 0");
    const double head = 0.5 * d - (2.0 + c.rho);
    require(head > 0.0, "constants: need d/2 - (2+rho) > 0");
    require(head < c.gamma, "constants: need d/2 - (2+rho) < gamma");
    require(c.delta > 0.0, "constants: need delta > 0");
    if (c.low_dim) {
        require(c.omega > c.delta && c.omega < 1.0, "constants: need omega in (delta, 1)");
        require(c.gamma + c.delta < std::min(c.omega, c.Delta),
                "constants: need gamma + delta < min(omega, Delta)");
        require(c.beta_hat > 0.0, "constants: low-dim mode needs beta_hat > 0");
    } else {
        require(c.gamma + c.delta < std::min({1.0, c.Delta, 0.5 * (d - 4.0)}),
                "constants: need gamma + delta < min(1, Delta, (d-4)/2)");
    }
}

bool InductionState::is_excluded(int l, long j) const {
    return std::find(excluded.begin(), excluded.end(), std::make_pair(l, j)) != excluded.end();
}

namespace {

InductionState init_state(const ModelParams& params, const FourierGrid& grid,
                          const InductionConstants& consts) {
    validate_params(params);
    validate_constants(consts, params.kernel.d);
    if (grid.d != params.kernel.d)
        throw ValidationError("induction state: grid dimension does not match params");
    InductionState st;
    st.d = params.kernel.d;
    st.eps = params.eps;
    st.lambda = params.lambda;
    st.sigma2 = kernel_moments(params.kernel).sigma2;
    st.beta = consts.low_dim ? consts.beta_hat : params.kernel.beta;
    st.n_max = params.n_max;
    st.consts = consts;
    const long K = grid.size();
    st.ks.reserve(K);
    for (long j = 0; j < K; ++j) st.ks.push_back(grid.kvec(j));
    st.avals = grid.avals;
    return st;
}

}  // namespace

InductionState make_induction_state(const ModelParams& params, const SpaceTimeField& tau,
                                    const SpaceTimeField& pi, const FourierGrid& grid,
                                    const InductionConstants& consts) {
    InductionState st = init_state(params, grid, consts);
    if (tau.d != st.d || tau.n_max != params.n_max || tau.R != params.R ||
        pi.d != st.d || pi.n_max != params.n_max || pi.R != params.R)
        throw ValidationError("make_induction_state: field windows do not match params");

    const long K = static_cast<long>(st.avals.size());
    const int n_max = params.n_max;
    st.f.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.e.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.g.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.f0.assign(n_max + 1, 0.0);
    st.g0.assign(n_max + 1, 0.0);
    st.grad2_g.assign(n_max + 1, 0.0);

    const double phat0 = step_mass(params);
    for (int n = 0; n <= n_max; ++n) {
        st.f0[n] = tau.slice_sum(n);
        for (long j = 0; j < K; ++j) {
            st.f[n][j] = tau.fourier(n, st.ks[j]);
            st.e[n][j] = pi.fourier(n, st.ks[j]);
        }
    }
    for (int l = 1; l <= n_max; ++l) {
        // g_l(k) = pihat_{l-1}(k) * phat(k); phat(k) = 1 - eps + lambda*eps*Dhat.
        for (long j = 0; j < K; ++j)
            st.g[l][j] = st.e[l - 1][j] * step_fourier(params, st.ks[j]);
        const double pihat0 = pi.slice_sum(l - 1);
        st.g0[l] = pihat0 * phat0;
        st.grad2_g[l] = -phat0 * pi.second_moment(l - 1) -
                        pihat0 * params.lambda * params.eps * st.sigma2;
    }
    return st;
}

InductionState make_rw_induction_state(const ModelParams& params, const FourierGrid& grid,
                                       const InductionConstants& consts) {
    InductionState st = init_state(params, grid, consts);
    const long K = static_cast<long>(st.avals.size());
    const int n_max = params.n_max;
    st.f.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.e.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.g.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.f0.assign(n_max + 1, 0.0);
    st.g0.assign(n_max + 1, 0.0);
    st.grad2_g.assign(n_max + 1, 0.0);

    const double phat0 = step_mass(params);
    for (long j = 0; j < K; ++j) {
        const double phat = step_fourier(params, st.ks[j]);
        double power = 1.0;
        st.e[0][j] = 1.0;  // pi = delta at time 0
        for (int n = 0; n <= n_max; ++n) {
            st.f[n][j] = power;
            power *= phat;
        }
        if (n_max >= 1) st.g[1][j] = phat;
    }
    double mass_power = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        st.f0[n] = mass_power;
        mass_power *= phat0;
    }
    if (n_max >= 1) st.g0[1] = phat0;
    st.lambda_n.assign(n_max + 1, 1.0);  // all g_l(0) vanish for l >= 2
    return st;
}

std::vector<double> lambda_sequence(const ModelParams& base, const PiExtractor& extract_pi,
                                    int n_max) {
    if (n_max < 0) throw ValidationError("lambda_sequence: n_max must be >= 0");
    if (base.n_max < n_max - 1)
        throw ValidationError("lambda_sequence: base horizon too short for requested n_max");
    std::vector<double> lam(n_max + 1, 1.0);
    std::map<double, SpaceTimeField> cache;
    for (int n = 2; n <= n_max; ++n) {
        const double trial = lam[n - 1];
        auto it = cache.find(trial);
        if (it == cache.end()) it = cache.emplace(trial, extract_pi(trial)).first;
        const SpaceTimeField& pi = it->second;
        const double phat0 = 1.0 - base.eps + trial * base.eps;
        double sum = 0.0;
        for (int l = 2; l <= n; ++l) sum += pi.slice_sum(l - 1) * phat0;
        lam[n] = 1.0 - sum / base.eps;
    }
    return lam;
}

void v_and_r_sequences(InductionState& st) {
    const int n_max = st.n_max;
    const long K = static_cast<long>(st.avals.size());
    st.v_n.assign(n_max + 1, st.lambda);
    st.r.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.r0.assign(n_max + 1, 0.0);
    st.s.assign(n_max + 1, std::vector<double>(K, 0.0));
    st.excluded.clear();

    double grad2_sum = 0.0, weight_sum = 0.0;
    for (int n = 2; n <= n_max; ++n) {
        grad2_sum += st.grad2_g[n];
        weight_sum += static_cast<double>(n - 1) * st.g0[n];
        st.v_n[n] = (st.lambda - grad2_sum / (st.sigma2 * st.eps)) / (1.0 + weight_sum);
    }

    if (n_max >= 1) {
        st.r0[1] = st.lambda - 1.0;
        std::fill(st.r[1].begin(), st.r[1].end(), st.lambda - 1.0);
    }
    for (int l = 2; l <= n_max; ++l) {
        st.r0[l] = std::abs(st.f0[l - 1]) > kVanishTol
                       ? (st.f0[l] / st.f0[l - 1] - 1.0) / st.eps
                       : 0.0;
        for (long j = 0; j < K; ++j) {
            if (std::abs(st.f[l - 1][j]) <= kVanishTol) {
                st.excluded.emplace_back(l, j);
                continue;
            }
            st.r[l][j] = (st.f[l][j] / st.f[l - 1][j] - 1.0 + st.eps * st.v_n[l] * st.avals[j]) /
                         st.eps;
        }
    }
    for (int l = 1; l <= n_max; ++l) {
        const double denom = 1.0 + st.eps * st.r0[l];
        for (long j = 0; j < K; ++j) {
            if (st.is_excluded(l, j)) continue;
            st.s[l][j] = denom != 0.0
                             ? (st.eps * st.v_n[l] * st.r0[l] * st.avals[j] +
                                (st.r[l][j] - st.r0[l])) / denom
                             : 0.0;
        }
    }
}

double reconstruction_error(const InductionState& st, int m) {
    if (m < 0 || m > st.n_max || st.r.empty())
        throw ValidationError("reconstruction_error: sequences not filled to m");
    double worst = 0.0;
    const long K = static_cast<long>(st.avals.size());
    for (long j = 0; j < K; ++j) {
        double prod = 1.0;
        bool usable = true;
        for (int l = 1; l <= m; ++l) {
            if (st.is_excluded(l, j)) {
                usable = false;
                break;
            }
            prod *= 1.0 - st.eps * st.v_n[l] * st.avals[j] + st.eps * st.r[l][j];
        }
        if (usable) worst = std::max(worst, std::abs(prod - st.f[m][j]));
    }
    return worst;
}

double f0_product_error(const InductionState& st, int m) {
    if (m < 0 || m > st.n_max || st.r0.empty())
        throw ValidationError("f0_product_error: sequences not filled to m");
    double prod = 1.0;
    for (int l = 1; l <= m; ++l) prod *= 1.0 + st.eps * st.r0[l];
    return std::abs(prod - st.f0[m]);
}

bool in_Am(const InductionState& st, double a, int m) {
    return a <= st.consts.gamma * std::log(2.0 + m * st.eps) / (1.0 + m * st.eps);
}

HypothesisReport check_hypotheses(const InductionState& st, int n) {
    if (n < 1 || n > st.n_max) throw ValidationError("check_hypotheses: n out of range");
    if (static_cast<int>(st.lambda_n.size()) <= n)
        throw ValidationError("check_hypotheses: lambda_n not filled to n");
    if (static_cast<int>(st.v_n.size()) <= n || st.r.empty())
        throw ValidationError("check_hypotheses: v/r sequences not filled (run v_and_r_sequences)");

    const InductionConstants& c = st.consts;
    const long K = static_cast<long>(st.avals.size());
    const double d2 = 0.5 * st.d;
    // Decay powers: low-dim mode replaces d/2 -> 2+omega and (d-2)/2 -> 1+omega
    // in H1-H3; H4 keeps the d/2 powers.
    const double p1 = c.low_dim ? 2.0 + c.omega : d2;
    const double p2 = c.low_dim ? 1.0 + c.omega : d2 - 1.0;
    const double p3 = c.low_dim ? 1.0 + c.omega : d2 - 1.0;

    HypothesisReport rep;
    rep.worst_margin = kInf;
    auto push = [&](HypothesisEntry e) {
        if (e.margin < 0.0) rep.all_pass = false;
        if (e.margin < rep.worst_margin) {
            rep.worst_margin = e.margin;
            rep.worst_m = e.m;
            rep.worst_hypothesis = e.hypothesis;
        }
        rep.entries.push_back(std::move(e));
    };

    for (int m = 1; m <= n; ++m) {
        const double tm = 1.0 + m * st.eps;

        HypothesisEntry h1{m, 1, -1, std::abs(st.lambda_n[m] - st.lambda_n[m - 1]),
                           st.eps * c.K1 * st.beta / std::pow(tm, p1), 0.0};
        h1.margin = h1.bound - h1.left;
        if (h1.margin < 0.0) rep.h1_margins_nonneg = false;
        push(h1);

        HypothesisEntry h2{m, 2, -1, std::abs(st.v_n[m] - st.v_n[m - 1]),
                           st.eps * c.K2 * st.beta / std::pow(tm, p2), 0.0};
        h2.margin = h2.bound - h2.left;
        push(h2);

        HypothesisEntry h3{m, 3, -1, 0.0, 0.0, kInf};
        for (int l = 1; l <= m; ++l) {
            const double tl = 1.0 + l * st.eps;
            const double b0 = c.K3 * st.beta / std::pow(tl, p3);
            if (b0 - std::abs(st.r0[l]) < h3.margin)
                h3 = {m, 3, -1, std::abs(st.r0[l]), b0, b0 - std::abs(st.r0[l])};
            for (long j = 0; j < K; ++j) {
                if (!in_Am(st, st.avals[j], m) || st.is_excluded(l, j)) continue;
                const double left = std::abs(st.r[l][j] - st.r0[l]);
                const double bound = c.K3 * st.beta * st.avals[j] / std::pow(tl, c.delta);
                if (bound - left < h3.margin) h3 = {m, 3, j, left, bound, bound - left};
            }
        }
        push(h3);

        HypothesisEntry h4{m, 4, -1, 0.0, 0.0, kInf};
        for (long j = 0; j < K; ++j) {
            const double a = st.avals[j];
            if (a <= 0.0 || in_Am(st, a, m)) continue;
            const double b1 = c.K4 * std::pow(a, -2.0 - c.rho) / std::pow(tm, d2);
            const double l1 = std::abs(st.f[m][j]);
            if (b1 - l1 < h4.margin) h4 = {m, 4, j, l1, b1, b1 - l1};
            const double b2 = st.eps * c.K5 * std::pow(a, -1.0 - c.rho) / std::pow(tm, d2);
            const double l2 = std::abs(st.f[m][j] - st.f[m - 1][j]);
            if (b2 - l2 < h4.margin) h4 = {m, 4, j, l2, b2, b2 - l2};
        }
        push(h4);
    }

    // Interval nesting I_0 superset ... superset I_n with half-widths
    // K1*beta/(1+m eps)^{(d-2)/2} (low-dim: power 1+omega); I_0 = I_1.
    const double pw = c.low_dim ? 1.0 + c.omega : d2 - 1.0;
    auto half_width = [&](int m) { return c.K1 * st.beta / std::pow(1.0 + m * st.eps, pw); };
    for (int m = 1; m <= n; ++m) {
        const double wm = half_width(m), wp = half_width(m - 1);
        if (st.lambda_n[m] - wm < st.lambda_n[m - 1] - wp - 1e-15 ||
            st.lambda_n[m] + wm > st.lambda_n[m - 1] + wp + 1e-15)
            rep.intervals_nested = false;
    }
    return rep;
}

std::string report_to_csv(const HypothesisReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "m,hypothesis,k_index,left,bound,margin\n";
    for (const auto& e : report.entries)
        out << e.m << ',' << e.hypothesis << ',' << e.k_index << ',' << e.left << ',' << e.bound
            << ',' << e.margin << '\n';
    return out.str();
}

}  // namespace spreadout
