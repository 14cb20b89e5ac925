// diagrams.cpp -- diagram generation, constructions, and factor-elimination
// evaluation of the bound hierarchy.

#include "spreadout/diagrams.hpp"

#include <algorithm>
#include <cmath>

namespace spreadout {

namespace {

bool tau_bearing(LineKind k) {
    return k == LineKind::tau || k == LineKind::p_star_tau || k == LineKind::lamEpsD_star_tau;
}

const SpaceTimeField& kind_field(const LineFields& lf, LineKind k) {
    switch (k) {
        case LineKind::delta: return lf.del;
        case LineKind::tau: return lf.tau;
        case LineKind::p_star_tau: return lf.pst;
        case LineKind::lamEpsD: return lf.ld;
        case LineKind::lamEpsD_star_tau: return lf.ldt;
    }
    throw InvariantError("kind_field: unknown kind");
}

std::vector<std::pair<std::vector<int>, double>> scaled_kernel(const KernelD& k, double c) {
    std::vector<std::pair<std::vector<int>, double>> g;
    g.reserve(k.entries.size());
    for (const auto& [x, m] : k.entries) g.emplace_back(x, c * m);
    return g;
}

}  // namespace

LineFields make_line_fields(const ModelParams& params, const SpaceTimeField& tau) {
    validate_params(params);
    if (tau.d != params.kernel.d || tau.n_max != params.n_max || tau.R != params.R)
        throw ValidationError("make_line_fields: tau window does not match params");
    if (params.R < params.kernel.L * params.n_max)
        throw ValidationError("make_line_fields: window overflow, need R >= L*n_max");
    const Box box = tau.box();
    const double le = params.lambda * params.eps;
    const auto step = step_distribution(params);
    const auto led = scaled_kernel(params.kernel, le);
    const auto d_only = scaled_kernel(params.kernel, 1.0);

    LineFields lf;
    lf.tau = tau;
    lf.del = SpaceTimeField::delta(tau.d, tau.eps, tau.n_max, tau.R);
    lf.pst = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    lf.ldt = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    lf.dt = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    lf.ld = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    lf.dtld = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    lf.pstld = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    if (tau.n_max >= 1)
        convolve_slice_add(box, &lf.del.at(0, 0), led, 1.0, &lf.ld.at(1, 0));
    for (int n = 1; n <= tau.n_max; ++n) {
        convolve_slice_add(box, &tau.at(n - 1, 0), step, 1.0, &lf.pst.at(n, 0));
        convolve_slice_add(box, &tau.at(n - 1, 0), led, 1.0, &lf.ldt.at(n, 0));
        convolve_slice_add(box, &tau.at(n - 1, 0), d_only, 1.0, &lf.dt.at(n, 0));
    }
    for (int n = 1; n <= tau.n_max; ++n) {
        convolve_slice_add(box, &lf.dt.at(n - 1, 0), led, 1.0, &lf.dtld.at(n, 0));
        convolve_slice_add(box, &lf.pst.at(n - 1, 0), led, 1.0, &lf.pstld.at(n, 0));
    }
    return lf;
}

SpaceTimeField line_function_L(const std::vector<int>& u_site, int u_slice,
                               const std::vector<int>& v_site, int v_slice,
                               const SpaceTimeField& tau, const ModelParams& params) {
    const LineFields lf = make_line_fields(params, tau);
    SpaceTimeField out = SpaceTimeField::zeros(tau.d, tau.eps, tau.n_max, tau.R);
    if (params.lambda == 0.0) return out;  // every branch carries a lambda*eps*D factor
    const bool same = (u_slice == v_slice) && (u_site == v_site);
    const Box box = tau.box();
    std::vector<int> x(tau.d), xu(tau.d), xv(tau.d);
    for (int n = 0; n <= tau.n_max; ++n) {
        for (long s = 0; s < box.size(); ++s) {
            box.coords(s, x.data());
            for (int i = 0; i < tau.d; ++i) {
                xu[i] = x[i] - u_site[i];
                xv[i] = x[i] - v_site[i];
            }
            const int nu = n - u_slice, nv = n - v_slice;
            double val;
            if (same) {
                val = lf.dt.value(nu, xu) * lf.ldt.value(nu, xu) +
                      lf.dtld.value(nu, xu) * lf.tau.value(nu, xu);
            } else {
                const double phi = lf.del.value(nu, xu) + lf.pst.value(nu, xu);
                const double phild = lf.ld.value(nu, xu) + lf.pstld.value(nu, xu);
                val = phi * lf.ldt.value(nv, xv) + phild * lf.tau.value(nv, xv);
            }
            if (val != 0.0) out.at(n, s) = val;
        }
    }
    return out;
}

// --- construction helpers -------------------------------------------------------

namespace {

int next_line_id(const DiagramGraph& g, int level) {
    int m = -1;
    for (const auto& e : g.edges)
        if (e.adm_level == level) m = std::max(m, e.adm_line);
    return m + 1;
}

// Reroot the tau factor of edge i at vertex y:  kappa(w - v) becomes
// kappa(y - v) * (lambda*eps*D * tau)(w - y).  Both pieces inherit the tag.
void split_spat(DiagramGraph& g, std::size_t i, int y) {
    DiagramEdge& e = g.edges[i];
    const int level = e.adm_level, to = e.to;
    const int id1 = next_line_id(g, level);
    e.to = y;
    e.adm_line = id1;
    g.edges.push_back({y, to, LineKind::lamEpsD_star_tau, 0, 1.0, level, id1 + 1});
}

// Temporal variant: the tau factor is cut at a new vertex u carrying a
// spatial bond to y and a temporal bond into the remainder:
//   kappa(w - v) becomes kappa(u - v) * leD(y - u) * (1-eps) * tau(w - u - eps).
void split_temp(DiagramGraph& g, std::size_t i, int u, int y, double eps) {
    DiagramEdge& e = g.edges[i];
    const int level = e.adm_level, to = e.to;
    const int id1 = next_line_id(g, level);
    e.to = u;
    e.adm_line = id1;
    g.edges.push_back({u, y, LineKind::lamEpsD, 0, 1.0, -1, -1});
    g.edges.push_back({u, to, LineKind::tau, 1, 1.0 - eps, level, id1 + 1});
}

// Locate the tau-carrying tagged edge of a line.
std::size_t find_line_edge(const DiagramGraph& g, const LineRef& line) {
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (g.edges[i].adm_level == line.level && g.edges[i].adm_line == line.line &&
            tau_bearing(g.edges[i].kind))
            return i;
    throw ValidationError("construction: line is not an admissible tau-carrying line");
}

// Append a fresh interior vertex, keeping the output vertex last: the old
// output is relabeled to the new last index and the freed index is returned.
int insert_vertex(DiagramGraph& g) {
    const int old_out = g.n_vertices - 1;
    ++g.n_vertices;
    for (auto& e : g.edges) {
        if (e.from == old_out) e.from = g.n_vertices - 1;
        if (e.to == old_out) e.to = g.n_vertices - 1;
    }
    for (auto& p : g.pins)
        if (p.vertex == old_out) p.vertex = g.n_vertices - 1;
    return old_out;
}

}  // namespace

std::vector<DiagramGraph> apply_construction_B(const DiagramGraph& g, const LineRef& line,
                                               const BTarget& target, BVariant variant,
                                               const ModelParams& params) {
    if (target.mode == BTarget::Mode::endpoint) {
        DiagramGraph out = g;
        out.prefactor *= 2.0 * params.lambda * params.eps;
        return {out};
    }
    std::vector<DiagramGraph> out;
    auto pin_y = [&](DiagramGraph& h, int y) {
        if (target.mode == BTarget::Mode::point)
            h.pins.push_back({y, target.slice, true, target.site});
        else if (target.mode == BTarget::Mode::slice)
            h.pins.push_back({y, target.slice, false, {}});
    };
    if (variant == BVariant::spat || variant == BVariant::both) {
        DiagramGraph h = g;
        const std::size_t i = find_line_edge(h, line);
        const int y = insert_vertex(h);
        split_spat(h, i, y);
        pin_y(h, y);
        out.push_back(std::move(h));
    }
    if (variant == BVariant::temp || variant == BVariant::both) {
        DiagramGraph h = g;
        const std::size_t i = find_line_edge(h, line);
        const int u = insert_vertex(h);
        const int y = insert_vertex(h);
        split_temp(h, i, u, y, params.eps);
        pin_y(h, y);
        out.push_back(std::move(h));
    }
    return out;
}

// --- evaluation -------------------------------------------------------------------

namespace {

struct Factor {
    std::vector<int> vars;     // sorted ascending
    std::vector<double> table; // row-major over vars, W cells each
};

struct Evaluator {
    const LineFields& lf;
    long S;
    int n_max;
    long W;
    Box box;
    std::vector<int> disp;  // disp[sa*S+sb] = site index of (xb - xa), or -1

    Evaluator(const LineFields& fields)
        : lf(fields), S(fields.tau.slice_size()), n_max(fields.tau.n_max), W((n_max + 1) * S),
          box(fields.tau.box()) {
        disp.assign(S * S, -1);
        std::vector<int> a(box.d), b(box.d), dxy(box.d);
        for (long i = 0; i < S; ++i) {
            box.coords(i, a.data());
            for (long j = 0; j < S; ++j) {
                box.coords(j, b.data());
                bool ok = true;
                for (int c = 0; c < box.d; ++c) {
                    dxy[c] = b[c] - a[c];
                    if (dxy[c] < -box.R || dxy[c] > box.R) ok = false;
                }
                if (ok) disp[i * S + j] = static_cast<int>(box.index(dxy.data()));
            }
        }
    }

    double edge_value(const DiagramEdge& e, long cfrom, long cto) const {
        const int dn = static_cast<int>(cto / S) - static_cast<int>(cfrom / S) - e.time_shift;
        if (dn < 0 || dn > n_max) return 0.0;
        const int di = disp[(cfrom % S) * S + (cto % S)];
        if (di < 0) return 0.0;
        return e.scalar * kind_field(lf, e.kind).at(dn, di);
    }
};

constexpr std::size_t kTableCap = 50'000'000;

SpaceTimeField run_elimination(const DiagramGraph& g, const Evaluator& ev,
                               const std::vector<int>& order) {
    const long W = ev.W;
    const int V = g.n_vertices, out_v = g.output();
    std::vector<Factor> factors;

    // Pin of the origin vertex, plus explicit pins.
    {
        Factor f;
        f.vars = {0};
        f.table.assign(W, 0.0);
        std::vector<int> o(ev.box.d, 0);
        f.table[ev.box.index(o.data())] = 1.0;
        factors.push_back(std::move(f));
    }
    for (const auto& p : g.pins) {
        Factor f;
        f.vars = {p.vertex};
        f.table.assign(W, 0.0);
        if (p.pin_site) {
            if (p.slice >= 0 && p.slice <= ev.n_max && ev.box.contains(p.site.data()))
                f.table[static_cast<std::size_t>(p.slice) * ev.S + ev.box.index(p.site.data())] = 1.0;
        } else if (p.slice >= 0 && p.slice <= ev.n_max) {
            for (long s = 0; s < ev.S; ++s)
                f.table[static_cast<std::size_t>(p.slice) * ev.S + s] = 1.0;
        }
        factors.push_back(std::move(f));
    }
    // One pairwise factor per vertex pair, merging parallel edges pointwise.
    std::vector<std::vector<const DiagramEdge*>> pair_edges(V * V);
    for (const auto& e : g.edges) {
        if (e.from == e.to) throw InvariantError("diagram has a self-loop");
        const int a = std::min(e.from, e.to), b = std::max(e.from, e.to);
        pair_edges[a * V + b].push_back(&e);
    }
    for (int a = 0; a < V; ++a)
        for (int b = a + 1; b < V; ++b) {
            const auto& es = pair_edges[a * V + b];
            if (es.empty()) continue;
            Factor f;
            f.vars = {a, b};
            f.table.assign(W * W, 0.0);
            for (long ca = 0; ca < W; ++ca)
                for (long cb = 0; cb < W; ++cb) {
                    double v = 1.0;
                    for (const DiagramEdge* e : es) {
                        v *= (e->from == a) ? ev.edge_value(*e, ca, cb) : ev.edge_value(*e, cb, ca);
                        if (v == 0.0) break;
                    }
                    f.table[ca * W + cb] = v;
                }
            factors.push_back(std::move(f));
        }

    double scalar_acc = g.prefactor;
    std::vector<char> remaining(V, 1);
    remaining[out_v] = 0;

    auto eliminate = [&](int v) {
        std::vector<Factor> gathered;
        std::vector<Factor> kept;
        for (auto& f : factors) {
            if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
                gathered.push_back(std::move(f));
            else
                kept.push_back(std::move(f));
        }
        factors = std::move(kept);
        if (gathered.empty()) {
            scalar_acc *= static_cast<double>(W);  // unconstrained free vertex
            return;
        }
        std::vector<int> nv;
        for (const auto& f : gathered)
            for (int u : f.vars)
                if (u != v) nv.push_back(u);
        std::sort(nv.begin(), nv.end());
        nv.erase(std::unique(nv.begin(), nv.end()), nv.end());
        std::size_t tsize = 1;
        for (std::size_t i = 0; i < nv.size(); ++i) {
            tsize *= W;
            if (tsize > kTableCap) throw CapError("diagram elimination table exceeds cap");
        }
        // Per gathered factor: stride of v and strides of each nv position.
        struct Access {
            const Factor* f;
            long v_stride = 0;
            std::vector<std::pair<int, long>> nv_strides;  // (position in nv, stride)
        };
        std::vector<Access> acc;
        for (const auto& f : gathered) {
            Access a;
            a.f = &f;
            long stride = 1;
            for (int i = static_cast<int>(f.vars.size()) - 1; i >= 0; --i) {
                if (f.vars[i] == v) {
                    a.v_stride = stride;
                } else {
                    const int pos = static_cast<int>(
                        std::lower_bound(nv.begin(), nv.end(), f.vars[i]) - nv.begin());
                    a.nv_strides.emplace_back(pos, stride);
                }
                stride *= W;
            }
            acc.push_back(std::move(a));
        }
        Factor result;
        result.vars = nv;
        result.table.assign(tsize, 0.0);
        std::vector<long> cell(nv.size(), 0);
        for (std::size_t idx = 0; idx < tsize; ++idx) {
            // decode idx -> cells of nv (row-major)
            std::size_t rem = idx;
            for (int i = static_cast<int>(nv.size()) - 1; i >= 0; --i) {
                cell[i] = static_cast<long>(rem % W);
                rem /= W;
            }
            double sum = 0.0;
            for (long cv = 0; cv < W; ++cv) {
                double prod = 1.0;
                for (const auto& a : acc) {
                    long fidx = a.v_stride * cv;
                    for (const auto& [pos, stride] : a.nv_strides) fidx += stride * cell[pos];
                    prod *= a.f->table[fidx];
                    if (prod == 0.0) break;
                }
                sum += prod;
            }
            result.table[idx] = sum;
        }
        if (nv.empty())
            scalar_acc *= result.table[0];
        else
            factors.push_back(std::move(result));
    };

    if (!order.empty()) {
        for (int v : order) {
            if (v == out_v || v < 0 || v >= V || !remaining[v])
                throw ValidationError("evaluate_diagram: bad elimination order");
            remaining[v] = 0;
            eliminate(v);
        }
        for (int v = 0; v < V; ++v)
            if (remaining[v]) throw ValidationError("evaluate_diagram: elimination order incomplete");
    } else {
        for (;;) {
            int best = -1;
            std::size_t best_deg = 0;
            for (int v = 0; v < V; ++v) {
                if (!remaining[v]) continue;
                std::vector<int> nb;
                for (const auto& f : factors)
                    if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
                        for (int u : f.vars)
                            if (u != v) nb.push_back(u);
                std::sort(nb.begin(), nb.end());
                nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
                if (best < 0 || nb.size() < best_deg) {
                    best = v;
                    best_deg = nb.size();
                }
            }
            if (best < 0) break;
            remaining[best] = 0;
            eliminate(best);
        }
    }

    // Fold the remaining factors (all over the output vertex) into the result.
    SpaceTimeField outf =
        SpaceTimeField::zeros(ev.box.d, ev.lf.tau.eps, ev.n_max, ev.box.R);
    std::vector<double> acc_out(W, scalar_acc);
    for (const auto& f : factors) {
        if (f.vars.size() != 1 || f.vars[0] != out_v)
            throw InvariantError("evaluate_diagram: leftover factor not on the output vertex");
        for (long c = 0; c < W; ++c) acc_out[c] *= f.table[c];
    }
    for (long c = 0; c < W; ++c) outf.data[c] = acc_out[c];
    return outf;
}

}  // namespace

SpaceTimeField evaluate_diagram(const DiagramGraph& g, const LineFields& lf,
                                const ModelParams& params, const std::vector<int>& order) {
    (void)params;
    Evaluator ev(lf);
    return run_elimination(g, ev, order);
}

SpaceTimeField evaluate_terms(const std::vector<DiagramGraph>& terms, const LineFields& lf,
                              const ModelParams& params) {
    (void)params;
    Evaluator ev(lf);
    SpaceTimeField sum = SpaceTimeField::zeros(lf.tau.d, lf.tau.eps, lf.tau.n_max, lf.tau.R);
    for (const auto& t : terms) {
        SpaceTimeField f = run_elimination(t, ev, {});
        for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += f.data[i];
    }
    return sum;
}

// --- the bound hierarchy --------------------------------------------------------

namespace {

// The two two-line diagrams of 2*lambda*eps * L(v,v;x) appended at the old
// output ov, tagged at `level`; `twice` selects the prefactor 2 (recursion)
// vs 1 (base level).
void append_loop_terms(std::vector<DiagramGraph>& out, const DiagramGraph& parent, int level,
                       double pref) {
    const int ov = parent.output();
    {
        DiagramGraph h = parent;  // (leD*tau)(x-v) * (tau*leD)(x-v)
        const int w = h.n_vertices, x = h.n_vertices + 1;
        h.n_vertices += 2;
        h.edges.push_back({ov, x, LineKind::lamEpsD_star_tau, 0, 1.0, level, 0});
        h.edges.push_back({ov, w, LineKind::tau, 0, 1.0, level, 1});
        h.edges.push_back({w, x, LineKind::lamEpsD, 0, 1.0, level, 1});
        h.prefactor *= pref;
        out.push_back(std::move(h));
    }
    {
        DiagramGraph h = parent;  // (leD*tau*leD)(x-v) * tau(x-v)
        const int w = h.n_vertices, x = h.n_vertices + 1;
        h.n_vertices += 2;
        h.edges.push_back({ov, w, LineKind::lamEpsD_star_tau, 0, 1.0, level, 0});
        h.edges.push_back({w, x, LineKind::lamEpsD, 0, 1.0, level, 0});
        h.edges.push_back({ov, x, LineKind::tau, 0, 1.0, level, 1});
        h.prefactor *= pref;
        out.push_back(std::move(h));
    }
}

// The four diagrams of L(v, y; x) for distinct v, y, appended to g with new
// output x; new lines are tagged at `level`.
void append_L_distinct(std::vector<DiagramGraph>& out, const DiagramGraph& g, int v, int y,
                       int level, double pref) {
    {   // phi = delta branch:  delta(x - v) * (tau * leD)(x - y)
        DiagramGraph h = g;
        const int w = h.n_vertices, x = h.n_vertices + 1;
        h.n_vertices += 2;
        h.edges.push_back({v, x, LineKind::delta, 0, 1.0, -1, -1});
        h.edges.push_back({y, w, LineKind::tau, 0, 1.0, level, 0});
        h.edges.push_back({w, x, LineKind::lamEpsD, 0, 1.0, level, 0});
        h.prefactor *= pref;
        out.push_back(std::move(h));
    }
    {   // phi = p*tau branch: (p*tau)(x - v) * (tau * leD)(x - y)
        DiagramGraph h = g;
        const int w = h.n_vertices, x = h.n_vertices + 1;
        h.n_vertices += 2;
        h.edges.push_back({v, x, LineKind::p_star_tau, 0, 1.0, level, 0});
        h.edges.push_back({y, w, LineKind::tau, 0, 1.0, level, 1});
        h.edges.push_back({w, x, LineKind::lamEpsD, 0, 1.0, level, 1});
        h.prefactor *= pref;
        out.push_back(std::move(h));
    }
    {   // (phi * leD), delta part:  leD(x - v) * tau(x - y)
        DiagramGraph h = g;
        const int x = h.n_vertices;
        h.n_vertices += 1;
        h.edges.push_back({v, x, LineKind::lamEpsD, 0, 1.0, -1, -1});
        h.edges.push_back({y, x, LineKind::tau, 0, 1.0, level, 0});
        h.prefactor *= pref;
        out.push_back(std::move(h));
    }
    {   // (phi * leD), p*tau part:  (p*tau*leD)(x - v) * tau(x - y)
        DiagramGraph h = g;
        const int w = h.n_vertices, x = h.n_vertices + 1;
        h.n_vertices += 2;
        h.edges.push_back({v, w, LineKind::p_star_tau, 0, 1.0, level, 0});
        h.edges.push_back({w, x, LineKind::lamEpsD, 0, 1.0, level, 0});
        h.edges.push_back({y, x, LineKind::tau, 0, 1.0, level, 1});
        h.prefactor *= pref;
        out.push_back(std::move(h));
    }
}

std::vector<DiagramGraph> base_terms() {
    std::vector<DiagramGraph> out;
    out.push_back(DiagramGraph{});  // delta term: one vertex, no edges
    DiagramGraph seed{};            // lambda*eps*L(o,o;x): prefactor 1 after absorbing
    append_loop_terms(out, seed, 0, 1.0);
    return out;
}

std::vector<DiagramGraph> recurse_terms(const std::vector<DiagramGraph>& parents, int level,
                                        const ModelParams& params) {
    std::vector<DiagramGraph> out;
    for (const auto& T : parents) {
        // y = v contribution via the endpoint convention.
        append_loop_terms(out, T, level, 2.0);
        // Constructions on each tau-carrying line tagged at the previous level.
        for (std::size_t i = 0; i < T.edges.size(); ++i) {
            const auto& e = T.edges[i];
            if (e.adm_level != level - 1 || !tau_bearing(e.kind)) continue;
            const int ov = T.output();
            {   // spatial construction, y summed freely (y = v term vanishes).
                DiagramGraph h = T;
                const int y = h.n_vertices++;
                split_spat(h, i, y);
                append_L_distinct(out, h, ov, y, level, 1.0);
            }
            {   // temporal construction ...
                DiagramGraph h = T;
                const int u = h.n_vertices++;
                const int y = h.n_vertices++;
                split_temp(h, i, u, y, params.eps);
                append_L_distinct(out, h, ov, y, level, 1.0);
            }
            {   // ... minus its y = v overlap.
                DiagramGraph h = T;
                const int u = h.n_vertices++;
                split_temp(h, i, u, ov, params.eps);
                append_L_distinct(out, h, ov, ov, level, -1.0);
            }
        }
    }
    return out;
}

}  // namespace

DiagramBounds build_diagram_bounds(const SpaceTimeField& tau, const ModelParams& params,
                                   int N_max, bool with_tilde) {
    if (N_max < 0 || N_max > 3) throw CapError("build_diagram_bounds: N_max must be in [0, 3]");
    const LineFields lf = make_line_fields(params, tau);
    DiagramBounds out;
    out.terms.push_back(base_terms());
    for (int N = 1; N <= N_max; ++N) out.terms.push_back(recurse_terms(out.terms[N - 1], N, params));
    for (int N = 0; N <= N_max; ++N) out.P.push_back(evaluate_terms(out.terms[N], lf, params));
    if (with_tilde) {
        out.tilde.resize(N_max + 1);
        for (int N = 1; N <= N_max; ++N) {
            for (int n = 1; n <= N; ++n) {
                std::vector<DiagramGraph> tilde_terms;
                for (const auto& T : out.terms[N]) {
                    for (std::size_t i = 0; i < T.edges.size(); ++i) {
                        const auto& e = T.edges[i];
                        if (e.adm_level != n || !tau_bearing(e.kind)) continue;
                        DiagramGraph h = T;
                        const int y = insert_vertex(h);
                        split_spat(h, i, y);
                        tilde_terms.push_back(std::move(h));
                    }
                }
                out.tilde[N].push_back(evaluate_terms(tilde_terms, lf, params));
            }
        }
    }
    return out;
}

}  // namespace spreadout
