// field.hpp -- dense real-valued functions on a finite space-time window.
//
// A SpaceTimeField stores f(n, x) for time slices n = 0..n_max and sites
// x in the cube [-R, R]^d.  It is the carrier for two-point functions,
// expansion coefficients and diagram values.  All heavy algorithms index
// sites through the flat row-major scheme of Box.

#pragma once

#include <cstdint>
#include <vector>

#include "spreadout/errors.hpp"

namespace spreadout {

// Cubic site window [-R, R]^d with row-major flat indexing.
struct Box {
    int d = 1;
    int R = 0;

    long side() const { return 2L * R + 1; }
    long size() const {
        long s = 1;
        for (int i = 0; i < d; ++i) s *= side();
        return s;
    }
    bool contains(const int* x) const {
        for (int i = 0; i < d; ++i)
            if (x[i] < -R || x[i] > R) return false;
        return true;
    }
    long index(const int* x) const {
        long idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * side() + (x[i] + R);
        return idx;
    }
    void coords(long idx, int* x) const {
        for (int i = d - 1; i >= 0; --i) {
            x[i] = static_cast<int>(idx % side()) - R;
            idx /= side();
        }
    }
};

struct SpaceTimeField {
    int d = 1;
    double eps = 1.0;
    int n_max = 0;
    int R = 0;
    std::vector<double> data;  // (n_max + 1) * (2R + 1)^d entries

    SpaceTimeField() = default;
    SpaceTimeField(int d_, double eps_, int n_max_, int R_);

    // All-zero field, and the field that is delta_{o,x} on slice 0.
    static SpaceTimeField zeros(int d, double eps, int n_max, int R);
    static SpaceTimeField delta(int d, double eps, int n_max, int R);

    Box box() const { return Box{d, R}; }
    long slice_size() const { return box().size(); }

    double& at(int n, long site) { return data[static_cast<std::size_t>(n) * slice_size() + site]; }
    const double& at(int n, long site) const { return data[static_cast<std::size_t>(n) * slice_size() + site]; }

    // Coordinate access; value() returns 0 outside the window.
    double value(int n, const std::vector<int>& x) const;
    void set(int n, const std::vector<int>& x, double v);

    // Per-slice reductions.
    double slice_sum(int n) const;
    double slice_abs_sum(int n) const;
    double second_moment(int n) const;  // sum_x |x|^2 f(n, x)
    double slice_sup(int n) const;      // max_x |f(n, x)|
    // Fourier transform of one slice at a single k: sum_x f(n,x) cos(k.x)
    // (fields here are symmetric, so the transform is real).
    double fourier(int n, const std::vector<double>& k) const;

    double max_abs_diff(const SpaceTimeField& other) const;
};

// out[x] += coeff * sum_y in[y] * g(x - y) for a finitely supported kernel g
// given as (offset, mass) pairs.  Contributions landing outside the window
// are dropped; callers guarantee R is large enough that nothing is lost.
void convolve_slice_add(const Box& box, const double* in,
                        const std::vector<std::pair<std::vector<int>, double>>& g,
                        double coeff, double* out);

}  // namespace spreadout
