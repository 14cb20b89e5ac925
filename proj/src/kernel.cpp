// kernel.cpp -- spread-out kernel construction, moments, Fourier analysis,
// and random-walk Green-sum estimates.

#include "spreadout/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "spreadout/field.hpp"

namespace spreadout {

namespace {

double norm2(const std::vector<int>& x) {
    double s = 0.0;
    for (int c : x) s += static_cast<double>(c) * c;
    return s;
}

}  // namespace

double KernelD::mass(const std::vector<int>& x) const {
    // Entries are lexicographically sorted, so binary search works.
    auto it = std::lower_bound(entries.begin(), entries.end(), x,
                               [](const auto& e, const std::vector<int>& key) { return e.first < key; });
    if (it != entries.end() && it->first == x) return it->second;
    return 0.0;
}

KernelD make_uniform_kernel(int d, int L, long support_cap) {
    if (d < 1 || L < 1) throw ValidationError("make_uniform_kernel: need d >= 1 and L >= 1");
    long side = 2L * L + 1;
    long cube = 1;
    for (int i = 0; i < d; ++i) {
        if (cube > support_cap / side) throw CapError("make_uniform_kernel: support size exceeds cap");
        cube *= side;
    }
    KernelD k;
    k.d = d;
    k.L = L;
    const double mass = 1.0 / static_cast<double>(cube - 1);
    Box box{d, L};
    std::vector<int> x(d);
    k.entries.reserve(cube - 1);
    for (long i = 0; i < box.size(); ++i) {
        box.coords(i, x.data());  // row-major order is lexicographic in offsets
        bool origin = std::all_of(x.begin(), x.end(), [](int c) { return c == 0; });
        if (origin) continue;
        k.entries.emplace_back(x, mass);
    }
    k.beta = std::pow(static_cast<double>(L), -d);
    k.sup_mass = mass;
    k.sup_constant = mass / k.beta;
    return k;
}

void validate_kernel(const KernelD& k, double tol) {
    double total = 0.0;
    for (const auto& [x, m] : k.entries) {
        if (m <= 0.0) throw InvariantError("kernel: nonpositive mass stored");
        bool origin = std::all_of(x.begin(), x.end(), [](int c) { return c == 0; });
        if (origin && m > tol) throw InvariantError("kernel: D(o) != 0");
        total += m;
    }
    if (std::abs(total - 1.0) > tol) throw InvariantError("kernel: masses do not sum to 1");
    // Lattice symmetries: reflection of each coordinate and coordinate
    // permutations must preserve the mass.  Checking all sign flips plus the
    // full reversal permutation covers the generated group for the uniform
    // family; arbitrary permutations are checked pairwise on sorted |x|.
    for (const auto& [x, m] : k.entries) {
        std::vector<int> y = x;
        for (int i = 0; i < k.d; ++i) {
            y[i] = -y[i];
            if (std::abs(k.mass(y) - m) > tol) throw InvariantError("kernel: sign-flip symmetry broken");
            y[i] = x[i];
        }
        if (k.d >= 2) {
            y = x;
            std::swap(y[0], y[1]);
            if (std::abs(k.mass(y) - m) > tol) throw InvariantError("kernel: permutation symmetry broken");
        }
    }
}

KernelMoments kernel_moments(const KernelD& k, double Delta) {
    if (Delta <= 0.0) throw ValidationError("kernel_moments: Delta must be positive");
    KernelMoments m;
    m.Delta = Delta;
    for (const auto& [x, mass] : k.entries) {
        double r2 = norm2(x);
        m.sigma2 += r2 * mass;
        m.moment_2p2Delta += std::pow(r2, 1.0 + Delta) * mass;
    }
    double sigma = std::sqrt(m.sigma2);
    m.c1 = m.c2 = sigma / k.L;
    return m;
}

std::vector<double> FourierGrid::kvec(long idx) const {
    std::vector<double> k(d);
    const double step = 2.0 * M_PI / M;
    for (int i = d - 1; i >= 0; --i) {
        long m = idx % M;
        idx /= M;
        if (m > M / 2) m -= M;  // map to (-pi, pi]
        k[i] = step * m;
    }
    return k;
}

FourierGrid fourier_transform(const KernelD& ker, int M) {
    if (M < 2 || M % 2 != 0) throw ValidationError("fourier_transform: M must be even and >= 2");
    if (M < 2 * (2 * ker.L + 1))
        throw ValidationError("fourier_transform: grid too small for the kernel support (aliasing)");
    FourierGrid g;
    g.d = ker.d;
    g.M = M;
    g.dhat.resize(g.size());
    g.avals.resize(g.size());
    double amax = 0.0;
    double rmin = 0.0, rmax = 0.0;
    bool have_ratio = false;
    for (long idx = 0; idx < g.size(); ++idx) {
        std::vector<double> k = g.kvec(idx);
        double s = 0.0;
        for (const auto& [x, mass] : ker.entries) {
            double kx = 0.0;
            for (int i = 0; i < ker.d; ++i) kx += k[i] * x[i];
            s += mass * std::cos(kx);
        }
        g.dhat[idx] = s;
        g.avals[idx] = 1.0 - s;
        amax = std::max(amax, g.avals[idx]);
        // a(k) / (L^2 |k|^2) on the low-|k| block ||k||_inf <= 1/L, k != 0.
        double kinf = 0.0, k2 = 0.0;
        for (double c : k) {
            kinf = std::max(kinf, std::abs(c));
            k2 += c * c;
        }
        if (k2 > 0.0 && kinf <= 1.0 / ker.L) {
            double ratio = g.avals[idx] / (static_cast<double>(ker.L) * ker.L * k2);
            if (!have_ratio) {
                rmin = rmax = ratio;
                have_ratio = true;
            } else {
                rmin = std::min(rmin, ratio);
                rmax = std::max(rmax, ratio);
            }
        }
    }
    g.eta = 2.0 - amax;
    g.low_ratio_min = rmin;
    g.low_ratio_max = rmax;
    return g;
}

std::vector<std::pair<std::vector<int>, double>> inverse_transform(const FourierGrid& g, int L) {
    std::vector<std::pair<std::vector<int>, double>> out;
    Box box{g.d, L};
    std::vector<int> x(g.d);
    for (long i = 0; i < box.size(); ++i) {
        box.coords(i, x.data());
        double s = 0.0;
        for (long idx = 0; idx < g.size(); ++idx) {
            std::vector<double> k = g.kvec(idx);
            double kx = 0.0;
            for (int j = 0; j < g.d; ++j) kx += k[j] * x[j];
            s += g.dhat[idx] * std::cos(kx);
        }
        out.emplace_back(x, s / static_cast<double>(g.size()));
    }
    return out;
}

double convolution_power_at_origin(const KernelD& k, int n) {
    if (n < 1) throw ValidationError("convolution_power_at_origin: n >= 1 required");
    // Dense array over the growing box [-nL, nL]^d.
    Box box{k.d, k.L * n};
    std::vector<double> cur(box.size(), 0.0), next;
    std::vector<int> o(k.d, 0);
    cur[box.index(o.data())] = 1.0;  // D^{*0} = delta
    for (int step = 0; step < n; ++step) {
        next.assign(box.size(), 0.0);
        convolve_slice_add(box, cur.data(), k.entries, 1.0, next.data());
        cur.swap(next);
    }
    return cur[box.index(o.data())];
}

GreensSumResult rw_greens_sum(const KernelD& k, int n_max, TailMode mode, int M) {
    if (n_max < 2) throw ValidationError("rw_greens_sum: n_max >= 2 required");
    GreensSumResult res;

    // Truncated x-space sum through n_max (one running convolution).
    Box box{k.d, k.L * n_max};
    std::vector<double> cur(box.size(), 0.0), next;
    std::vector<int> o(k.d, 0);
    long oidx = box.index(o.data());
    cur[oidx] = 1.0;
    double prev_term = 0.0, last_term = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        next.assign(box.size(), 0.0);
        convolve_slice_add(box, cur.data(), k.entries, 1.0, next.data());
        cur.swap(next);
        if (n >= 2) {
            prev_term = last_term;
            last_term = cur[oidx];
            res.partial_sum += last_term;
        }
    }
    res.n_used = n_max;

    // Geometric tail estimate from the ratio of the last two terms.
    double tail = 0.0;
    if (prev_term > 0.0 && last_term > 0.0 && last_term < prev_term) {
        double r = last_term / prev_term;
        tail = last_term * r / (1.0 - r);
    }

    if (mode == TailMode::Truncate) {
        res.value = res.partial_sum + tail;
        res.error_estimate = std::max(tail, last_term);
    } else {
        if (k.d <= 2)
            throw InvariantError("rw_greens_sum: sum_{n>=2} D^{*n}(o) diverges for d <= 2 (recurrent walk)");
        if (M <= 0) M = (k.d <= 3) ? 64 : 16;
        if (M < 2 * (2 * k.L + 1)) M = 2 * (2 * k.L + 2);
        if (M % 2 != 0) ++M;
        FourierGrid g = fourier_transform(k, M);
        // Riemann sum of Dhat^2/(1-Dhat), excluding the k=0 singularity.
        double q = 0.0;
        for (long idx = 0; idx < g.size(); ++idx) {
            if (g.avals[idx] <= 0.0) continue;  // the k=0 point (a=0)
            q += g.dhat[idx] * g.dhat[idx] / g.avals[idx];
        }
        q /= static_cast<double>(g.size());
        res.value = q;
        res.error_estimate = std::max(std::abs(q - (res.partial_sum + tail)), last_term);
    }
    res.beta_ratio = res.value / k.beta;
    return res;
}

std::string kernel_to_json(const KernelD& k) {
    nlohmann::json j;
    j["d"] = k.d;
    j["L"] = k.L;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [x, m] : k.entries) entries.push_back({x, m});
    j["entries"] = entries;
    return j.dump();
}

KernelD kernel_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("kernel_from_json: ") + e.what());
    }
    KernelD k;
    try {
        k.d = j.at("d").get<int>();
        k.L = j.at("L").get<int>();
        for (const auto& e : j.at("entries")) {
            std::vector<int> x = e.at(0).get<std::vector<int>>();
            double m = e.at(1).get<double>();
            if (static_cast<int>(x.size()) != k.d)
                throw ValidationError("kernel_from_json: offset dimension mismatch");
            k.entries.emplace_back(std::move(x), m);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("kernel_from_json: ") + e.what());
    }
    std::sort(k.entries.begin(), k.entries.end());
    k.beta = std::pow(static_cast<double>(k.L), -k.d);
    for (const auto& [x, m] : k.entries) k.sup_mass = std::max(k.sup_mass, m);
    k.sup_constant = k.sup_mass / k.beta;
    validate_kernel(k);
    return k;
}

}  // namespace spreadout
