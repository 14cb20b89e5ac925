// diagrams.hpp -- diagrammatic upper bounds on the expansion coefficients.
//
// A diagram is a small DAG over space-time summation variables.  Vertex 0 is
// pinned at the origin (o, 0) and the last vertex is the output x; every edge
// carries one line factor (a space-time function of the displacement), an
// optional extra time shift and scalar, and an admissible-line tag.  Diagram
// values are computed by factor elimination over the dense window.
//
// The generation rules:
//   base level:  delta  plus the two two-line diagrams of the loop function L
//                at the origin, both lines tagged level 0;
//   level N:     from each level-(N-1) term, (a) the endpoint contribution
//                2*lambda*eps * term x L(v,v;x), and (b) for each tagged
//                level-(N-1) line, both constructions (spatial and temporal)
//                rerooting the line at a new summed vertex y, composed with
//                L(v,y;x); the y = v overlap of the temporal construction is
//                subtracted (the spatial one vanishes by time monotonicity).
// New lines created by L are tagged with the current level; when a
// construction splits a line, both tau-carrying pieces inherit its tag.

#pragma once

#include "spreadout/field.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

// Line factor kinds as space-time functions of the displacement (x, n):
//   delta             delta_{x,0} delta_{n,0}
//   tau               tau_n(x)
//   p_star_tau        (p_eps * tau)_n(x)        = sum_y p(y) tau_{n-1}(x-y)
//   lamEpsD           lambda*eps*D(x) at n = 1, else 0
//   lamEpsD_star_tau  (lambda*eps*D * tau)_n(x) = sum_y leD(y) tau_{n-1}(x-y)
enum class LineKind { delta, tau, p_star_tau, lamEpsD, lamEpsD_star_tau };

struct DiagramEdge {
    int from = 0;
    int to = 0;
    LineKind kind = LineKind::tau;
    int time_shift = 0;   // factor evaluated at (dx, dn - time_shift)
    double scalar = 1.0;  // e.g. (1 - eps) on the temporal-construction tail
    int adm_level = -1;   // admissible-line tag: level, or -1 if untagged
    int adm_line = -1;    // line id within the level
};

// Optional constraint on a summation vertex: fix its time slice, and
// optionally also its site.
struct VertexPin {
    int vertex = 0;
    int slice = 0;
    bool pin_site = false;
    std::vector<int> site;
};

struct DiagramGraph {
    int n_vertices = 1;  // vertex 0 = origin (always pinned), last = output
    std::vector<DiagramEdge> edges;
    double prefactor = 1.0;
    std::vector<VertexPin> pins;

    int output() const { return n_vertices - 1; }
};

// Precomputed line-factor fields shared by all evaluations at fixed (params,
// tau).  dt / dtld carry no lambda*eps and appear only in the loop function.
struct LineFields {
    SpaceTimeField tau;   // as given
    SpaceTimeField pst;   // p * tau
    SpaceTimeField ldt;   // lambda*eps*D * tau
    SpaceTimeField ld;    // lambda*eps*D at slice 1
    SpaceTimeField del;   // delta
    SpaceTimeField dt;    // D * tau
    SpaceTimeField dtld;  // D * tau * lambda*eps*D
    SpaceTimeField pstld; // p * tau * lambda*eps*D
};
LineFields make_line_fields(const ModelParams& params, const SpaceTimeField& tau);

// The loop function L(u, v; x) as a field over x, for pinned space-time
// points u = (u_site, u_slice), v = (v_site, v_slice).  Uses the two-branch
// definition (distinct endpoints vs. coinciding endpoints); identically zero
// when lambda = 0.
SpaceTimeField line_function_L(const std::vector<int>& u_site, int u_slice,
                               const std::vector<int>& v_site, int v_slice,
                               const SpaceTimeField& tau, const ModelParams& params);

// --- constructions ----------------------------------------------------------

struct LineRef {
    int level = 0;
    int line = 0;
};

enum class BVariant { spat, temp, both };

struct BTarget {
    enum class Mode {
        point,     // y pinned at (site, slice)
        slice,     // y pinned at a time slice, summed over sites
        summed,    // y fully summed
        endpoint   // y at the output: the 2*lambda*eps convention
    };
    Mode mode = Mode::summed;
    int slice = 0;
    std::vector<int> site;
};

// Apply a construction to the tagged tau-carrying line (level, line) of the
// diagram.  Returns one graph for spat or temp, two for both; the endpoint
// mode returns the unmodified graph with prefactor scaled by 2*lambda*eps
// (the line-sum convention).  Throws ValidationError if the line is absent
// or not tau-carrying.
std::vector<DiagramGraph> apply_construction_B(const DiagramGraph& g, const LineRef& line,
                                               const BTarget& target, BVariant variant,
                                               const ModelParams& params);

// --- evaluation ---------------------------------------------------------------

// Contract the diagram to a field over the output vertex.  `order`, if given,
// lists the elimination order of the non-output vertices (any order yields
// the same value); default is min-degree.
SpaceTimeField evaluate_diagram(const DiagramGraph& g, const LineFields& lf,
                                const ModelParams& params, const std::vector<int>& order = {});

// Sum of evaluate_diagram over a term list.
SpaceTimeField evaluate_terms(const std::vector<DiagramGraph>& terms, const LineFields& lf,
                              const ModelParams& params);

// --- the bound hierarchy -------------------------------------------------------

struct DiagramBounds {
    // P[N] for N = 0..N_max.
    std::vector<SpaceTimeField> P;
    // terms[N]: the term list generating P[N] (kept for inspection / reuse).
    std::vector<std::vector<DiagramGraph>> terms;
    // tilde[N][n-1] for 1 <= n <= N: the summed spatial construction applied
    // to the n-th tagged lines of P^(N).  Filled only when with_tilde.
    std::vector<std::vector<SpaceTimeField>> tilde;
};

// Build P^(0)..P^(N_max) (N_max <= 3) and optionally the tilde bounds.
DiagramBounds build_diagram_bounds(const SpaceTimeField& tau, const ModelParams& params,
                                   int N_max, bool with_tilde = false);

}  // namespace spreadout
