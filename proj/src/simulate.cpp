// simulate.cpp -- replica Monte Carlo for the discretized contact process.

#include "spreadout/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <thread>

namespace spreadout {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kBondSalt = 0x5b0ad2cafe15f00dULL;

int pick_threads(int requested, long samples) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    int t = static_cast<int>(hw ? hw : 1);
    t = static_cast<int>(std::min<long>(t, std::max<long>(1, samples / 256)));
    return std::max(1, std::min(t, 16));
}

// Precompiled step distribution: flat index displacements plus probabilities.
// Valid only for sites at least L away from the window boundary; the caller
// checks coordinates before using the fast path.
struct CompiledStep {
    std::vector<std::pair<std::vector<int>, double>> entries;
    std::vector<long> jumps;  // flat-index displacement per entry
    int L = 0;                // max |offset|_inf

    CompiledStep(const ModelParams& params, const Box& box) {
        entries = step_distribution(params);
        jumps.reserve(entries.size());
        std::vector<int> z(box.d, 0);
        const long origin = box.index(z.data());
        for (const auto& [off, p] : entries) {
            (void)p;
            jumps.push_back(box.index(off.data()) - origin);
            for (int c : off) L = std::max(L, std::abs(c));
        }
    }
};

// Frontier growth scratch reused across replicas (per thread).
struct GrowScratch {
    std::vector<double> survive;  // product of (1 - p) per candidate site, kept at 1.0
    std::vector<long> touched;

    void ensure(long S) {
        if (static_cast<long>(survive.size()) < S) survive.assign(S, 1.0);
    }
};

// One frontier step: C_{n+1} from C_n; draws keyed on (stream, slice n+1, site).
void grow_step(const Box& box, const CompiledStep& step, std::uint64_t stream, int n,
               const std::vector<long>& current, std::vector<long>& next, GrowScratch& scratch) {
    const long S = box.size();
    scratch.touched.clear();
    std::vector<int> xy(box.d);
    for (long ysite : current) {
        box.coords(ysite, xy.data());
        bool interior = true;
        for (int i = 0; i < box.d; ++i)
            if (std::abs(xy[i]) + step.L > box.R) interior = false;
        if (!interior) throw InvariantError("cluster reached the window boundary; enlarge R");
        for (std::size_t j = 0; j < step.jumps.size(); ++j) {
            long cidx = ysite + step.jumps[j];
            if (scratch.survive[cidx] == 1.0) scratch.touched.push_back(cidx);
            scratch.survive[cidx] *= 1.0 - step.entries[j].second;
        }
    }
    std::sort(scratch.touched.begin(), scratch.touched.end());
    scratch.touched.erase(std::unique(scratch.touched.begin(), scratch.touched.end()),
                          scratch.touched.end());
    next.clear();
    for (long cidx : scratch.touched) {
        double q = 1.0 - scratch.survive[cidx];
        scratch.survive[cidx] = 1.0;
        std::uint64_t counter = static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(S) +
                                static_cast<std::uint64_t>(cidx);
        if (rng_uniform(rng_mix(stream, counter)) < q) next.push_back(cidx);
    }
}

}  // namespace

std::uint64_t rng_mix(std::uint64_t a, std::uint64_t b) {
    return splitmix(splitmix(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

double rng_uniform(std::uint64_t h) {
    return static_cast<double>(splitmix(h) >> 11) * 0x1.0p-53;
}

ClusterTrace run_cluster(const ModelParams& params, std::uint64_t stream) {
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const CompiledStep step(params, box);
    GrowScratch scratch;
    scratch.ensure(box.size());

    ClusterTrace trace;
    std::vector<int> o(params.kernel.d, 0);
    std::vector<long> current{box.index(o.data())}, next;

    auto emit_slice = [&](const std::vector<long>& sites) {
        std::vector<std::vector<int>> out;
        out.reserve(sites.size());
        std::vector<int> x(params.kernel.d);
        for (long s : sites) {
            box.coords(s, x.data());
            out.push_back(x);
        }
        trace.slices.push_back(std::move(out));
    };
    emit_slice(current);

    for (int n = 0; n < params.n_max; ++n) {
        if (current.empty()) {
            trace.slices.emplace_back();
            continue;
        }
        grow_step(box, step, stream, n, current, next, scratch);
        current.swap(next);
        emit_slice(current);
        if (current.empty() && trace.extinction_time < 0) trace.extinction_time = n + 1;
    }
    return trace;
}

namespace {

EstimatorResult finish_estimate(const ModelParams& params, std::vector<double>& counts,
                                long samples, std::uint64_t seed) {
    EstimatorResult res;
    res.samples = samples;
    res.seed = seed;
    res.mean = SpaceTimeField::zeros(params.kernel.d, params.eps, params.n_max, params.R);
    res.stderr_ = SpaceTimeField::zeros(params.kernel.d, params.eps, params.n_max, params.R);
    const double N = static_cast<double>(samples);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double p = counts[i] / N;
        res.mean.data[i] = p;
        // Indicator samples: sample variance = p(1-p) N/(N-1).
        res.stderr_.data[i] = (samples > 1) ? std::sqrt(std::max(0.0, p * (1.0 - p) / (N - 1.0))) : 0.0;
    }
    for (int n = 0; n <= params.n_max; ++n) {
        SliceStats st;
        st.tau_hat0 = res.mean.slice_sum(n);
        st.second_moment = res.mean.second_moment(n);
        st.sup = res.mean.slice_sup(n);
        res.per_slice.push_back(st);
        res.susceptibility_partial += params.eps * st.tau_hat0;
    }
    return res;
}

template <typename Fn>
void run_replica_ranges(long samples, int threads, std::size_t accum_size,
                        std::vector<double>& counts, Fn&& body) {
    counts.assign(accum_size, 0.0);
    if (threads <= 1) {
        body(0, samples, counts);
        return;
    }
    std::vector<std::vector<double>> partial(threads, std::vector<double>(accum_size, 0.0));
    std::vector<std::thread> pool;
    long chunk = (samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long lo = t * chunk, hi = std::min<long>(samples, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, t] { body(lo, hi, partial[t]); });
    }
    for (auto& th : pool) th.join();
    // Deterministic merge in thread-index order.
    for (const auto& part : partial)
        for (std::size_t i = 0; i < accum_size; ++i) counts[i] += part[i];
}

}  // namespace

EstimatorResult estimate_two_point(const ModelParams& params, long samples, std::uint64_t seed,
                                   int threads) {
    if (samples < 1) throw ValidationError("estimate_two_point: samples >= 1 required");
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const long S = box.size();
    const CompiledStep step(params, box);
    std::vector<double> counts;
    run_replica_ranges(samples, pick_threads(threads, samples),
                       static_cast<std::size_t>(params.n_max + 1) * S, counts,
                       [&](long lo, long hi, std::vector<double>& acc) {
                           GrowScratch scratch;
                           scratch.ensure(S);
                           std::vector<int> o(params.kernel.d, 0);
                           const long origin = box.index(o.data());
                           std::vector<long> current, next;
                           for (long r = lo; r < hi; ++r) {
                               std::uint64_t stream = rng_mix(seed, static_cast<std::uint64_t>(r));
                               current.assign(1, origin);
                               acc[origin] += 1.0;
                               for (int n = 0; n < params.n_max && !current.empty(); ++n) {
                                   grow_step(box, step, stream, n, current, next, scratch);
                                   current.swap(next);
                                   for (long site : current)
                                       acc[static_cast<std::size_t>(n + 1) * S + site] += 1.0;
                               }
                           }
                       });
    return finish_estimate(params, counts, samples, seed);
}

namespace {

// One bond-level cluster realization: explicit occupied bonds with node ids
// n * S + site, grown slice by slice from the origin.
struct BondRealization {
    std::vector<std::vector<long>> reached;    // per slice, flat site ids
    std::vector<std::pair<long, long>> bonds;  // occupied (from node, to node)
};

BondRealization realize_bonds(const ModelParams& params, const Box& box, const CompiledStep& step,
                              std::uint64_t stream, std::vector<char>& seen) {
    const long S = box.size();
    const std::uint64_t bond_stream = stream ^ kBondSalt;
    BondRealization out;
    std::vector<int> o(params.kernel.d, 0), xy(params.kernel.d);
    out.reached.push_back({box.index(o.data())});
    for (int n = 0; n < params.n_max; ++n) {
        std::vector<long> next;
        for (long ysite : out.reached[n]) {
            box.coords(ysite, xy.data());
            bool interior = true;
            for (int i = 0; i < box.d; ++i)
                if (std::abs(xy[i]) + step.L > box.R) interior = false;
            if (!interior) throw InvariantError("estimate_pi0: cluster reached the window boundary");
            for (std::size_t j = 0; j < step.jumps.size(); ++j) {
                std::uint64_t counter =
                    (static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(S) +
                     static_cast<std::uint64_t>(ysite)) *
                        static_cast<std::uint64_t>(step.jumps.size()) +
                    j;
                if (rng_uniform(rng_mix(bond_stream, counter)) >= step.entries[j].second) continue;
                long cidx = ysite + step.jumps[j];
                out.bonds.emplace_back(static_cast<long>(n) * S + ysite,
                                       static_cast<long>(n + 1) * S + cidx);
                if (!seen[cidx]) {
                    seen[cidx] = 1;
                    next.push_back(cidx);
                }
            }
        }
        for (long cidx : next) seen[cidx] = 0;
        std::sort(next.begin(), next.end());
        out.reached.push_back(std::move(next));
    }
    return out;
}

}  // namespace

// Max number of bond-disjoint directed paths from src to dst, stopped at 2.
// Unit capacity per occupied bond, BFS augmenting paths (Menger).
// Exposed internally for the exact module as well via this translation unit?
// No: exact has its own copy specialized to its bond lists.
namespace detail {

int max_flow_two(const std::vector<std::pair<long, long>>& bonds, long src, long dst) {
    if (src == dst) return 2;  // convention: x => x
    std::vector<long> nodes;
    nodes.reserve(bonds.size() * 2 + 2);
    for (const auto& [u, v] : bonds) {
        nodes.push_back(u);
        nodes.push_back(v);
    }
    nodes.push_back(src);
    nodes.push_back(dst);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    auto id = [&](long n) {
        return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), n) - nodes.begin());
    };
    const int V = static_cast<int>(nodes.size());
    std::vector<int> head(V, -1), to, nxt, cap;
    auto add_edge = [&](int u, int v) {
        to.push_back(v); cap.push_back(1); nxt.push_back(head[u]); head[u] = static_cast<int>(to.size()) - 1;
        to.push_back(u); cap.push_back(0); nxt.push_back(head[v]); head[v] = static_cast<int>(to.size()) - 1;
    };
    for (const auto& [u, v] : bonds) add_edge(id(u), id(v));
    const int s = id(src), t = id(dst);
    int flow = 0;
    std::vector<int> prev_edge(V);
    while (flow < 2) {
        std::fill(prev_edge.begin(), prev_edge.end(), -1);
        std::vector<int> queue{s};
        prev_edge[s] = -2;
        bool found = false;
        for (std::size_t qi = 0; qi < queue.size() && !found; ++qi) {
            int u = queue[qi];
            for (int e = head[u]; e != -1; e = nxt[e]) {
                if (cap[e] <= 0 || prev_edge[to[e]] != -1) continue;
                prev_edge[to[e]] = e;
                if (to[e] == t) {
                    found = true;
                    break;
                }
                queue.push_back(to[e]);
            }
        }
        if (!found) break;
        for (int v = t; v != s;) {
            int e = prev_edge[v];
            cap[e] -= 1;
            cap[e ^ 1] += 1;
            v = to[e ^ 1];
        }
        ++flow;
    }
    return flow;
}

}  // namespace detail

EstimatorResult estimate_pi0(const ModelParams& params, long samples, std::uint64_t seed,
                             int threads) {
    if (samples < 1) throw ValidationError("estimate_pi0: samples >= 1 required");
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const long S = box.size();
    const CompiledStep step(params, box);
    std::vector<int> o(params.kernel.d, 0);
    const long origin = box.index(o.data());
    std::vector<double> counts;
    run_replica_ranges(samples, pick_threads(threads, samples),
                       static_cast<std::size_t>(params.n_max + 1) * S, counts,
                       [&](long lo, long hi, std::vector<double>& acc) {
                           std::vector<char> seen(S, 0);
                           for (long r = lo; r < hi; ++r) {
                               BondRealization real = realize_bonds(
                                   params, box, step, rng_mix(seed, static_cast<std::uint64_t>(r)),
                                   seen);
                               acc[origin] += 1.0;  // n = 0: o => o by convention
                               for (int n = 1; n <= params.n_max; ++n)
                                   for (long site : real.reached[n])
                                       if (detail::max_flow_two(real.bonds, origin,
                                                                static_cast<long>(n) * S + site) >= 2)
                                           acc[static_cast<std::size_t>(n) * S + site] += 1.0;
                           }
                       });
    return finish_estimate(params, counts, samples, seed);
}

EstimatorResult merge_estimates(const EstimatorResult& a, const EstimatorResult& b) {
    if (a.mean.d != b.mean.d || a.mean.n_max != b.mean.n_max || a.mean.R != b.mean.R)
        throw ValidationError("merge_estimates: incompatible windows");
    EstimatorResult res = a;
    res.samples = a.samples + b.samples;
    const double wa = static_cast<double>(a.samples), wb = static_cast<double>(b.samples);
    const double N = wa + wb;
    for (std::size_t i = 0; i < res.mean.data.size(); ++i) {
        double p = (a.mean.data[i] * wa + b.mean.data[i] * wb) / N;
        res.mean.data[i] = p;
        res.stderr_.data[i] = (N > 1) ? std::sqrt(std::max(0.0, p * (1.0 - p) / (N - 1.0))) : 0.0;
    }
    res.per_slice.clear();
    res.susceptibility_partial = 0.0;
    for (int n = 0; n <= res.mean.n_max; ++n) {
        SliceStats st;
        st.tau_hat0 = res.mean.slice_sum(n);
        st.second_moment = res.mean.second_moment(n);
        st.sup = res.mean.slice_sup(n);
        res.per_slice.push_back(st);
        res.susceptibility_partial += res.mean.eps * st.tau_hat0;
    }
    return res;
}

std::vector<std::vector<double>> estimate_fourier(const ModelParams& params,
                                                  const std::vector<int>& slices,
                                                  const std::vector<std::vector<double>>& ks,
                                                  long samples, std::uint64_t seed, int threads) {
    if (samples < 1) throw ValidationError("estimate_fourier: samples >= 1 required");
    validate_params(params);
    const Box box{params.kernel.d, params.R};
    const long S = box.size();
    const CompiledStep step(params, box);
    std::vector<int> o(params.kernel.d, 0);
    const long origin = box.index(o.data());
    int max_slice = 0;
    for (int n : slices) max_slice = std::max(max_slice, n);
    if (max_slice > params.n_max) throw ValidationError("estimate_fourier: slice beyond horizon");
    const std::size_t cells = slices.size() * ks.size();
    std::vector<double> sums;
    run_replica_ranges(
        samples, pick_threads(threads, samples), cells, sums,
        [&](long lo, long hi, std::vector<double>& acc) {
            GrowScratch scratch;
            scratch.ensure(S);
            std::vector<long> current, next;
            std::vector<int> x(params.kernel.d);
            // want[n] = indices into `slices` requesting slice n.
            std::vector<std::vector<int>> want(max_slice + 1);
            for (std::size_t si = 0; si < slices.size(); ++si) want[slices[si]].push_back(static_cast<int>(si));
            for (long r = lo; r < hi; ++r) {
                std::uint64_t stream = rng_mix(seed, static_cast<std::uint64_t>(r));
                current.assign(1, origin);
                for (int n = 0; n <= max_slice; ++n) {
                    if (n > 0) {
                        if (!current.empty()) {
                            grow_step(box, step, stream, n - 1, current, next, scratch);
                            current.swap(next);
                        }
                    }
                    if (want[n].empty() || current.empty()) continue;
                    for (int si : want[n]) {
                        for (std::size_t kj = 0; kj < ks.size(); ++kj) {
                            double s = 0.0;
                            for (long site : current) {
                                box.coords(site, x.data());
                                double kx = 0.0;
                                for (int i = 0; i < params.kernel.d; ++i) kx += ks[kj][i] * x[i];
                                s += std::cos(kx);
                            }
                            acc[static_cast<std::size_t>(si) * ks.size() + kj] += s;
                        }
                    }
                }
            }
        });
    std::vector<std::vector<double>> out(slices.size(), std::vector<double>(ks.size(), 0.0));
    for (std::size_t si = 0; si < slices.size(); ++si)
        for (std::size_t kj = 0; kj < ks.size(); ++kj)
            out[si][kj] = sums[si * ks.size() + kj] / static_cast<double>(samples);
    return out;
}

}  // namespace spreadout
