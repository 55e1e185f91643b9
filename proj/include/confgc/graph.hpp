#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confgc/rational.hpp"

namespace confgc {

class PDAlgebra;

struct Edge {
    int tail = 0;
    int head = 0;
    bool operator==(const Edge&) const = default;
};

struct Decoration {
    int vertex = 0;
    int basis = 0; // index into the algebra basis; never the unit
    bool operator==(const Decoration&) const = default;
};

// A decorated graph, understood as the monomial
//   s_{e_1} s_{e_2} ... s_{e_E} . d_1 d_2 ... d_m
// with the edges (degree D-1 each) in list order followed by the decorations
// in list order. Vertices 0..n_ext-1 are external, n_ext..n_ext+n_int-1 are
// internal. Graphs produced by canonicalize() are in canonical form; anything
// else is raw.
struct DecoratedGraph {
    int n_ext = 0;
    int n_int = 0;
    int ambient_dim = 2;
    std::vector<Edge> edges;
    std::vector<Decoration> decorations;

    int n_vertices() const { return n_ext + n_int; }
    bool is_internal(int v) const { return v >= n_ext; }

    // Total order used for basis layouts and map keys.
    std::vector<int> encoding() const;
    bool operator==(const DecoratedGraph& o) const { return encoding() == o.encoding(); }
    bool operator<(const DecoratedGraph& o) const { return encoding() < o.encoding(); }
};

// Cohomological (^*-side) degree: (D-1) #edges - D #internal + total
// decoration degree. External vertices contribute 0.
int star_degree(const DecoratedGraph& g, const std::vector<int>& basis_degrees);

// First Betti number of the underlying graph (isolated vertices included).
int loop_order(const DecoratedGraph& g);

// Component index per vertex, components numbered by smallest member.
std::vector<int> connected_components(const DecoratedGraph& g, int* n_components = nullptr);

struct CanonResult {
    bool zero = true;
    DecoratedGraph graph;
    int sign = 1;
};

// The unique canonical representative (lexicographically minimal encoding over
// internal relabelings, edge reorderings and edge reorientations), with the
// accumulated Koszul sign. Returns zero when the graph equals its own negative
// under some symmetry, e.g. double edges for even D or tadpoles for odd D.
CanonResult canonicalize(const DecoratedGraph& g, const std::vector<int>& basis_degrees);

// Relabels external vertices by perm (perm[i] = new label of external i) and
// re-canonicalizes.
CanonResult act_symmetric_group(const std::vector<int>& perm, const DecoratedGraph& g,
                                const std::vector<int>& basis_degrees);

// Formal rational combination of canonical graphs, zero coefficients dropped.
using GraphSum = std::map<DecoratedGraph, Rational>;

// Canonicalizes `raw` and accumulates coeff * sign into `sum`.
void add_term(GraphSum& sum, const DecoratedGraph& raw, const Rational& coeff,
              const std::vector<int>& basis_degrees);

void scale(GraphSum& sum, const Rational& c);
void add_sum(GraphSum& into, const GraphSum& other, const Rational& c = Rational(1));

// Splits off the connected components made of internal vertices only (the
// parts a partition function evaluates). `cut` components are ordered by their
// smallest vertex and renumbered from 0; `rest` keeps all external vertices.
// `sign` is the Koszul sign of separating the generator list by component.
struct CutResult {
    int sign = 1;
    std::vector<DecoratedGraph> cut;
    DecoratedGraph rest;
};
CutResult cut_internal_components(const DecoratedGraph& g, const std::vector<int>& basis_degrees);

// Graph literal text format, used in golden files and CLI input:
//   graph D=<d> ext=<n> int=<k>; edges=(a,b)(c,d)...; dec[v]=<id>,...; coeff=<p>/<q>
// Vertices are 1-based in the literal; basis ids come from the algebra.
std::string graph_literal(const DecoratedGraph& g, const Rational& coeff, const PDAlgebra* algebra);
std::pair<DecoratedGraph, Rational> parse_graph_literal(const std::string& text, const PDAlgebra* algebra);

} // namespace confgc
