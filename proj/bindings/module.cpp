// Python bindings for the core operations: model construction, exact and
// Monte Carlo two-point functions, the recursion and its inversion, series
// constants, and the config-driven experiment runner.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spreadout/cli_io.hpp"
#include "spreadout/exact.hpp"
#include "spreadout/lace.hpp"
#include "spreadout/simulate.hpp"

namespace py = pybind11;
using namespace spreadout;

namespace {

ModelParams make_params(int d, int L, double eps, double lambda, int n_max, int R) {
    ModelParams p;
    p.kernel = make_uniform_kernel(d, L);
    p.eps = eps;
    p.lambda = lambda;
    p.n_max = n_max;
    p.R = R;
    validate_params(p);
    return p;
}

py::dict field_to_dict(const SpaceTimeField& f) {
    py::dict out;
    out["d"] = f.d;
    out["eps"] = f.eps;
    out["n_max"] = f.n_max;
    out["R"] = f.R;
    out["data"] = f.data;  // row-major: slice, then box index
    return out;
}

SpaceTimeField field_from_dict(const py::dict& d) {
    SpaceTimeField f(d["d"].cast<int>(), d["eps"].cast<double>(), d["n_max"].cast<int>(),
                     d["R"].cast<int>());
    f.data = d["data"].cast<std::vector<double>>();
    if (f.data.size() != static_cast<std::size_t>((f.n_max + 1) * f.slice_size()))
        throw ValidationError("field dict: data length does not match the window");
    return f;
}

}  // namespace

PYBIND11_MODULE(_spreadout, m) {
    m.doc() = "spread-out contact process toolkit";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<CapError>(m, "CapError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def_readonly("eps", &ModelParams::eps)
        .def_readonly("lambda_", &ModelParams::lambda)
        .def_readonly("n_max", &ModelParams::n_max)
        .def_readonly("R", &ModelParams::R);

    m.def("make_params", &make_params, py::arg("d"), py::arg("L"), py::arg("eps"),
          py::arg("lambda_"), py::arg("n_max"), py::arg("R"),
          "Model parameters with a uniform spread-out kernel of range L.");

    m.def(
        "exact_two_point",
        [](const ModelParams& p) { return field_to_dict(exact_two_point_dp(p)); },
        py::arg("params"), "Exact two-point function via the subset-distribution chain.");

    m.def(
        "estimate_two_point",
        [](const ModelParams& p, long samples, std::uint64_t seed, int threads) {
            const EstimatorResult r = estimate_two_point(p, samples, seed, threads);
            py::dict out;
            out["mean"] = field_to_dict(r.mean);
            out["stderr"] = field_to_dict(r.stderr_);
            out["samples"] = r.samples;
            out["susceptibility_partial"] = r.susceptibility_partial;
            return out;
        },
        py::arg("params"), py::arg("samples"), py::arg("seed") = 1, py::arg("threads") = 0,
        "Monte Carlo two-point function estimate.");

    m.def(
        "forward_solve",
        [](const ModelParams& p, const py::dict& pi) {
            return field_to_dict(forward_solve(p, field_from_dict(pi)));
        },
        py::arg("params"), py::arg("pi"), "Solve the recursion forward for tau given pi.");

    m.def(
        "invert_to_pi",
        [](const ModelParams& p, const py::dict& tau) {
            return field_to_dict(invert_to_pi(p, field_from_dict(tau)));
        },
        py::arg("params"), py::arg("tau"), "Recover the expansion coefficients from tau.");

    m.def(
        "lace_constants",
        [](const ModelParams& p, const py::dict& pi) {
            const LaceConstants c = lace_constants(p, field_from_dict(pi));
            py::dict out;
            out["residual"] = c.residual;
            out["A"] = c.A;
            out["v"] = c.v;
            out["pi_sum"] = c.pi_sum;
            out["denom"] = c.denom;
            out["tail_estimate"] = c.tail_estimate;
            return out;
        },
        py::arg("params"), py::arg("pi"), "Truncated-series critical constants.");

    m.def(
        "find_lambda_c",
        [](const ModelParams& base, double lo, double hi, double tol) {
            const PiExtractor extract = [&base](double lambda) {
                ModelParams p = base;
                p.lambda = lambda;
                return invert_to_pi(p, exact_two_point_dp(p));
            };
            const CriticalPoint cp = find_lambda_c(base, extract, lo, hi, tol);
            py::dict out;
            out["lambda_c"] = cp.lambda_c;
            out["residual"] = cp.residual;
            out["iterations"] = cp.iterations;
            return out;
        },
        py::arg("params"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-4,
        "Critical coupling by bisection on the exact backend.");

    m.def(
        "run_config",
        [](const std::string& text, const std::string& store_root) {
            const RunSummary s = run_experiment(parse_config(text), store_root);
            return s.json;
        },
        py::arg("config_text"), py::arg("store_root") = "",
        "Run an experiment from INI config text; returns the JSON summary.");

    m.attr("__version__") = kCodeVersion;
}
