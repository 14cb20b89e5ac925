// exact.cpp -- exact small-instance oracles (subset Markov chain and
// brute-force bond-configuration enumeration).

#include "spreadout/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace spreadout {

namespace {

constexpr double kProbTol = 1e-15;

// Sites reachable at slice n lie in the cone ||u||_inf <= n*L (spatial steps
// move at most L, temporal steps not at all).
bool in_cone(const std::vector<int>& u, int n, int L) {
    for (int c : u)
        if (std::abs(c) > n * L) return false;
    return true;
}

}  // namespace

std::vector<EnumeratedBond> enumerate_bonds(const ModelParams& params) {
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const long S = box.size();
    const auto step = step_distribution(params);
    std::vector<EnumeratedBond> bonds;
    std::vector<int> u(box.d), v(box.d);
    for (int n = 0; n < params.n_max; ++n) {
        for (long site = 0; site < S; ++site) {
            box.coords(site, u.data());
            if (!in_cone(u, n, params.kernel.L)) continue;
            for (const auto& [off, p] : step) {
                for (int i = 0; i < box.d; ++i) v[i] = u[i] + off[i];
                if (!box.contains(v.data())) continue;
                bonds.push_back({static_cast<long>(n) * S + site,
                                 static_cast<long>(n + 1) * S + box.index(v.data()), p});
            }
        }
    }
    // Already sorted by source slice because the slice loop is outermost.
    return bonds;
}

long count_positive_bonds(const ModelParams& params) {
    return static_cast<long>(enumerate_bonds(params).size());
}

SpaceTimeField exact_two_point_dp(const ModelParams& params, int v_cap) {
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const long S = box.size();
    if (S > v_cap) throw CapError("exact_two_point_dp: window cell count exceeds cap");
    const auto step = step_distribution(params);

    SpaceTimeField tau = SpaceTimeField::zeros(box.d, params.eps, params.n_max, params.R);
    std::vector<int> o(box.d, 0), u(box.d), v(box.d);
    const long origin = box.index(o.data());

    std::vector<double> dist(1ULL << S, 0.0), next(1ULL << S, 0.0);
    dist[1ULL << origin] = 1.0;
    tau.data[origin] = 1.0;

    // Submask enumeration scratch over the "free" target sites.
    std::vector<double> wts;
    std::vector<std::uint64_t> masks;
    std::vector<double> survive(S, 1.0);
    std::vector<long> touched;

    for (int n = 0; n < params.n_max; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint64_t state = 0; state < dist.size(); ++state) {
            double w = dist[state];
            if (w == 0.0) continue;
            if (state == 0) {
                next[0] += w;  // extinct stays extinct
                continue;
            }
            // q_x = 1 - prod_{y in state} (1 - p_eps(x - y)), via survival products.
            touched.clear();
            for (std::uint64_t rest = state; rest;) {
                long ysite = std::countr_zero(rest);
                rest &= rest - 1;
                box.coords(ysite, u.data());
                for (const auto& [off, p] : step) {
                    for (int i = 0; i < box.d; ++i) v[i] = u[i] + off[i];
                    if (!box.contains(v.data())) continue;
                    long c = box.index(v.data());
                    if (survive[c] == 1.0) touched.push_back(c);
                    survive[c] *= 1.0 - p;
                }
            }
            std::sort(touched.begin(), touched.end());
            // Split targets into forced (q = 1) and free sites; distribute w over
            // the product measure on the free ones by submask iteration.
            std::uint64_t forced = 0;
            double base = w;
            std::vector<long> free_sites;
            std::vector<double> ratio;
            for (long c : touched) {
                double q = 1.0 - survive[c];
                survive[c] = 1.0;
                if (q <= kProbTol) continue;
                if (q >= 1.0 - kProbTol) {
                    forced |= 1ULL << c;
                } else {
                    base *= 1.0 - q;
                    free_sites.push_back(c);
                    ratio.push_back(q / (1.0 - q));
                }
            }
            const std::size_t m = free_sites.size();
            wts.assign(1ULL << m, 0.0);
            masks.assign(1ULL << m, 0);
            wts[0] = base;
            masks[0] = forced;
            next[forced] += base;
            for (std::uint64_t t = 1; t < (1ULL << m); ++t) {
                int j = std::countr_zero(t);
                wts[t] = wts[t & (t - 1)] * ratio[j];
                masks[t] = masks[t & (t - 1)] | (1ULL << free_sites[j]);
                next[masks[t]] += wts[t];
            }
        }
        dist.swap(next);
        for (std::uint64_t state = 0; state < dist.size(); ++state) {
            double w = dist[state];
            if (w == 0.0) continue;
            for (std::uint64_t rest = state; rest;) {
                long site = std::countr_zero(rest);
                rest &= rest - 1;
                tau.data[static_cast<std::size_t>(n + 1) * S + site] += w;
            }
        }
    }
    return tau;
}

namespace {

// Forward reachability over time-ordered bonds as a 64-bit node mask.
// A bond participates when occupied in cfg, not the skipped index, and has
// neither endpoint in the forbidden node set.
std::uint64_t reach_mask(const std::vector<EnumeratedBond>& bonds, std::uint64_t cfg, long start,
                         int skip = -1, std::uint64_t forbidden = 0) {
    std::uint64_t reach = 1ULL << start;
    for (std::size_t i = 0; i < bonds.size(); ++i) {
        if (!((cfg >> i) & 1ULL) || static_cast<int>(i) == skip) continue;
        std::uint64_t fm = 1ULL << bonds[i].from, tm = 1ULL << bonds[i].to;
        if ((fm | tm) & forbidden) continue;
        if (reach & fm) reach |= tm;
    }
    return reach;
}

struct BruteSetup {
    Box box;
    long S;
    long origin;
    std::vector<EnumeratedBond> bonds;
};

BruteSetup brute_setup(const ModelParams& params, int b_cap) {
    validate_params(params);
    Box box{params.kernel.d, params.R};
    const long S = box.size();
    if (static_cast<long>(params.n_max + 1) * S > 64)
        throw CapError("brute force: space-time node count exceeds 64");
    auto bonds = enumerate_bonds(params);
    if (static_cast<long>(bonds.size()) > b_cap)
        throw CapError("brute force: bond count exceeds cap");
    std::vector<int> o(box.d, 0);
    return {box, S, box.index(o.data()), std::move(bonds)};
}

// Visit every bond configuration with its probability weight.  Extended
// precision keeps the 2^B-term sums within the 1e-12 oracle tolerance.
template <typename Fn>
void for_each_config(const std::vector<EnumeratedBond>& bonds, Fn&& fn) {
    const std::size_t B = bonds.size();
    for (std::uint64_t cfg = 0; cfg < (1ULL << B); ++cfg) {
        long double w = 1.0L;
        for (std::size_t i = 0; i < B; ++i)
            w *= ((cfg >> i) & 1ULL) ? static_cast<long double>(bonds[i].p)
                                     : 1.0L - static_cast<long double>(bonds[i].p);
        if (w > 0.0L) fn(cfg, w);
    }
}

void add_mask(std::vector<long double>& acc, std::uint64_t mask, long double w) {
    while (mask) {
        int node = std::countr_zero(mask);
        mask &= mask - 1;
        acc[static_cast<std::size_t>(node)] += w;
    }
}

SpaceTimeField collect(const ModelParams& params, const std::vector<long double>& acc) {
    SpaceTimeField f = SpaceTimeField::zeros(params.kernel.d, params.eps, params.n_max, params.R);
    for (std::size_t i = 0; i < acc.size(); ++i) f.data[i] = static_cast<double>(acc[i]);
    return f;
}

}  // namespace

SpaceTimeField brute_force_two_point(const ModelParams& params, int b_cap) {
    BruteSetup s = brute_setup(params, b_cap);
    std::vector<long double> acc(static_cast<std::size_t>(params.n_max + 1) * s.S, 0.0L);
    for_each_config(s.bonds, [&](std::uint64_t cfg, long double w) {
        add_mask(acc, reach_mask(s.bonds, cfg, s.origin), w);
    });
    return collect(params, acc);
}

SpaceTimeField brute_force_piN(const ModelParams& params, int N, int b_cap) {
    if (N != 0 && N != 1) throw ValidationError("brute_force_piN: only N = 0 and N = 1 supported");
    BruteSetup s = brute_setup(params, b_cap);
    std::vector<long double> acc(static_cast<std::size_t>(params.n_max + 1) * s.S, 0.0L);
    const std::size_t B = s.bonds.size();

    for_each_config(s.bonds, [&](std::uint64_t cfg, long double w) {
        // Doubly connected nodes: reachable, and reachable after removing any
        // single occupied bond (Menger: no single cutting bond).
        std::uint64_t reach_o = reach_mask(s.bonds, cfg, s.origin);
        std::uint64_t doubly = reach_o;
        for (std::size_t i = 0; i < B && doubly; ++i)
            if ((cfg >> i) & 1ULL) doubly &= reach_mask(s.bonds, cfg, s.origin, static_cast<int>(i));
        doubly |= 1ULL << s.origin;  // convention: a point is doubly connected to itself

        if (N == 0) {
            add_mask(acc, doubly, w);
            return;
        }

        for (std::size_t bi = 0; bi < B; ++bi) {
            if (!((cfg >> bi) & 1ULL)) continue;
            if (!((doubly >> s.bonds[bi].from) & 1ULL)) continue;  // need o => bottom of b
            // Cluster of the origin with b removed.
            std::uint64_t C = reach_mask(s.bonds, cfg, s.origin, static_cast<int>(bi));
            const long v = s.bonds[bi].to;
            std::uint64_t reach_v = reach_mask(s.bonds, cfg, v);
            // "through C": reachable from v, but not when bonds touching C are cut
            // (the start node itself never qualifies).
            std::uint64_t through = reach_v & ~reach_mask(s.bonds, cfg, v, -1, C);
            if (!through) continue;
            // Exclude nodes x admitting a cutting bond b' for v -> x whose bottom
            // is reached from v through C.
            std::uint64_t bad = 0;
            for (std::size_t bj = 0; bj < B; ++bj) {
                if (!((cfg >> bj) & 1ULL)) continue;
                if (!((through >> s.bonds[bj].from) & 1ULL)) continue;
                bad |= reach_v & ~reach_mask(s.bonds, cfg, v, static_cast<int>(bj));
            }
            add_mask(acc, through & ~bad, w);
        }
    });
    return collect(params, acc);
}

}  // namespace spreadout
