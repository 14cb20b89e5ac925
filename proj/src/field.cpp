// field.cpp -- SpaceTimeField storage and per-slice reductions.

#include "spreadout/field.hpp"

#include <cmath>
#include <cstdlib>

namespace spreadout {

SpaceTimeField::SpaceTimeField(int d_, double eps_, int n_max_, int R_)
    : d(d_), eps(eps_), n_max(n_max_), R(R_) {
    if (d < 1 || n_max < 0 || R < 0 || eps <= 0.0)
        throw ValidationError("SpaceTimeField: bad dimensions");
    data.assign(static_cast<std::size_t>(n_max + 1) * slice_size(), 0.0);
}

SpaceTimeField SpaceTimeField::zeros(int d, double eps, int n_max, int R) {
    return SpaceTimeField(d, eps, n_max, R);
}

SpaceTimeField SpaceTimeField::delta(int d, double eps, int n_max, int R) {
    SpaceTimeField f(d, eps, n_max, R);
    std::vector<int> o(d, 0);
    f.at(0, f.box().index(o.data())) = 1.0;
    return f;
}

double SpaceTimeField::value(int n, const std::vector<int>& x) const {
    if (n < 0 || n > n_max) return 0.0;
    Box b = box();
    if (!b.contains(x.data())) return 0.0;
    return at(n, b.index(x.data()));
}

void SpaceTimeField::set(int n, const std::vector<int>& x, double v) {
    Box b = box();
    if (n < 0 || n > n_max || !b.contains(x.data()))
        throw InvariantError("SpaceTimeField::set: point outside window");
    at(n, b.index(x.data())) = v;
}

double SpaceTimeField::slice_sum(int n) const {
    double s = 0.0;
    const double* p = data.data() + static_cast<std::size_t>(n) * slice_size();
    for (long i = 0; i < slice_size(); ++i) s += p[i];
    return s;
}

double SpaceTimeField::slice_abs_sum(int n) const {
    double s = 0.0;
    const double* p = data.data() + static_cast<std::size_t>(n) * slice_size();
    for (long i = 0; i < slice_size(); ++i) s += std::abs(p[i]);
    return s;
}

double SpaceTimeField::second_moment(int n) const {
    Box b = box();
    std::vector<int> x(d);
    double s = 0.0;
    const double* p = data.data() + static_cast<std::size_t>(n) * slice_size();
    for (long i = 0; i < b.size(); ++i) {
        if (p[i] == 0.0) continue;
        b.coords(i, x.data());
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) r2 += static_cast<double>(x[j]) * x[j];
        s += r2 * p[i];
    }
    return s;
}

double SpaceTimeField::slice_sup(int n) const {
    double s = 0.0;
    const double* p = data.data() + static_cast<std::size_t>(n) * slice_size();
    for (long i = 0; i < slice_size(); ++i) s = std::max(s, std::abs(p[i]));
    return s;
}

double SpaceTimeField::fourier(int n, const std::vector<double>& k) const {
    Box b = box();
    std::vector<int> x(d);
    double s = 0.0;
    const double* p = data.data() + static_cast<std::size_t>(n) * slice_size();
    for (long i = 0; i < b.size(); ++i) {
        if (p[i] == 0.0) continue;
        b.coords(i, x.data());
        double kx = 0.0;
        for (int j = 0; j < d; ++j) kx += k[j] * x[j];
        s += p[i] * std::cos(kx);
    }
    return s;
}

double SpaceTimeField::max_abs_diff(const SpaceTimeField& other) const {
    if (d != other.d || n_max != other.n_max || R != other.R)
        throw ValidationError("max_abs_diff: incompatible windows");
    double m = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        m = std::max(m, std::abs(data[i] - other.data[i]));
    return m;
}

void convolve_slice_add(const Box& box, const double* in,
                        const std::vector<std::pair<std::vector<int>, double>>& g,
                        double coeff, double* out) {
    std::vector<int> x(box.d), y(box.d);
    for (long i = 0; i < box.size(); ++i) {
        const double v = in[i];
        if (v == 0.0) continue;
        box.coords(i, y.data());
        for (const auto& [off, mass] : g) {
            for (int j = 0; j < box.d; ++j) x[j] = y[j] + off[j];
            if (!box.contains(x.data())) continue;
            out[box.index(x.data())] += coeff * v * mass;
        }
    }
}

}  // namespace spreadout
