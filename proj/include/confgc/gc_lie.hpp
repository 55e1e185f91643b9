#pragma once

#include <optional>
#include <vector>

#include "confgc/graph.hpp"
#include "confgc/pd_algebra.hpp"

namespace confgc {

// Formal rational combination of connected decorated graphs with no external
// vertices. GC-side degree is the negation of the ^*-side degree:
// D #vertices + (1-D) #edges - total decoration degree.
struct GCElement {
    const PDAlgebra* algebra = nullptr;
    GraphSum terms;

    bool empty() const { return terms.empty(); }
};

int gc_degree(const DecoratedGraph& g, const std::vector<int>& basis_degrees);

// Is the element homogeneous? Returns its GC degree if so.
std::optional<int> gc_degree_of(const GCElement& x);

// Value of the multiplicative extension of z on an arbitrary (possibly
// disconnected) graph with no external vertices: product of z over the
// connected components, with the Koszul extraction signs.
Rational evaluate_partition_function(const DecoratedGraph& g, const GCElement& z);

// z0: the one-vertex part of the partition function determined by the pairing
// alone. Coefficient of the vertex with decoration multiset S is eps(prod S).
GCElement z0(const PDAlgebra& algebra);

// Lie bracket of degree 1: joins one decoration of each argument into an edge,
// weighted by the inverse pairing. Implemented as the exact adjoint of the
// disconnecting part of the ^*-side edge-splitting differential.
GCElement bracket(const GCElement& x, const GCElement& y);

// Differential: vertex splitting (adjoint of edge contraction) plus internal
// decoration joining (adjoint of the connected part of edge splitting), plus
// [twist, x] when a twist is supplied.
GCElement d_gc(const GCElement& x, const GCElement* twist = nullptr);

struct MCBox {
    int max_vertices = 3;
    int max_loop_order = 2;
};

struct MCReport {
    MCBox box;
    GraphSum residual; // dz + 1/2 [z,z] on the test graphs inside the box
    bool holds = false;
};

// Checks the Maurer-Cartan equation for z inside the box, exactly: the
// residual coefficient on a test graph gamma is Z(d gamma) for the
// multiplicative extension Z of z.
MCReport check_mc(const GCElement& z, const MCBox& box);

// Partition of the terms by loop order; recombination reproduces z.
std::vector<std::pair<int, GCElement>> loop_decompose(const GCElement& z);

enum class ValenceMode { GE3, DoublePrime };

struct ValenceFilterResult {
    GCElement kept;
    GCElement rejected;
};

// GE3 keeps graphs with every vertex at least trivalent; DoublePrime keeps
// graphs with no univalent vertex and at least one >=3-valent vertex.
// Decorations count toward valence, tadpoles count twice.
ValenceFilterResult filter_valence(const GCElement& z, ValenceMode mode);

// Rewrites a tree-supported element modulo IHX into a fixed spanning set
// (echelon reduction against the relations generated by splitting a 4-valent
// vertex); idempotent. Throws NotATree on non-tree or non->=3-valent input.
GCElement ihx_normal_form(const GCElement& z);

// GC elements reuse the MC-element file format:
//   { "algebra": <builtin name or "file:...">, "graphs": [ {"graph": literal, "coeff": "p/q"}, ... ] }
void save_gc(const GCElement& z, const std::string& algebra_ref, std::ostream& os);
GCElement load_gc(std::istream& is, const PDAlgebra& algebra);

} // namespace confgc
