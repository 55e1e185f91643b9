#pragma once

#include <map>
#include <vector>

#include "confgc/graph.hpp"
#include "confgc/pd_algebra.hpp"

namespace confgc {

// The d_split piece: Leibniz sum over edges (tadpoles included), replacing
// each edge by the diagonal class decorations at its endpoints; unit
// decorations are reduced away.
GraphSum d_split(const DecoratedGraph& g, const PDAlgebra& algebra);

// The d_contr piece: contracts each non-tadpole edge with at least one
// internal endpoint.
GraphSum d_contr(const DecoratedGraph& g, const std::vector<int>& basis_degrees);

// Differential of ^*Gra_V: d_split on graphs without internal vertices.
GraphSum d_gra(const DecoratedGraph& g, const PDAlgebra& algebra);

// An ordered partition of the external labels 0..n-1; block j is collapsed to
// vertex j of the quotient factor and its members become the external vertices
// (in increasing order) of the j-th inserted factor.
struct CocompositionShape {
    std::vector<std::vector<int>> blocks;

    int arity() const { return static_cast<int>(blocks.size()); }
    void check(int n_ext) const; // throws ShapeMismatch

    static CocompositionShape singletons(int n_ext);
};

// One tensor term of a cocomposition: quotient (x) inserted_1 (x) ... The
// quotient factor carries all decorations.
struct TensorTerm {
    DecoratedGraph quotient;
    std::vector<DecoratedGraph> inserted;

    std::vector<int> key() const;
};
using TensorSum = std::map<std::vector<int>, std::pair<TensorTerm, Rational>>;

void add_tensor(TensorSum& sum, TensorTerm term, const Rational& coeff);

struct DeinsertionPolicy {
    bool quotient_tadpoles = true; // promoted intra-block edges
    bool inserted_tadpoles = true; // tadpoles of g may stay in the inserted factor
};

// De-insertion sum for the shape: internal vertices distribute over the
// factors (decorated ones must stay on the quotient), intra-block edges go to
// the inserted factor or become quotient tadpoles. Edge-label block order:
// inserted factors first (in order), then the quotient.
TensorSum deinsert(const DecoratedGraph& g, const CocompositionShape& shape,
                   const DeinsertionPolicy& policy, const std::vector<int>& basis_degrees);

// Cooperadic cocomposition of ^*Gra_D (undecorated input; both factors may
// receive tadpoles, cf. the tadpole term of the s^{12} cocomposition).
TensorSum cocompose(const DecoratedGraph& g, const CocompositionShape& shape);

// Comodule coaction of ^*Gra_D on ^*Gra_V: decorations stay on the module
// factor and the strict ^*Gra_D factors receive no tadpoles.
TensorSum coact(const DecoratedGraph& g, const CocompositionShape& shape,
                const std::vector<int>& basis_degrees);

// Koszul sign of permuting graded tensor factors: perm[i] is the source
// position of the factor landing at position i.
int tensor_reorder_sign(const std::vector<int>& degrees, const std::vector<int>& perm);

// Exhaustive coassociativity check over all graphs with <= max_edges edges on
// n_ext external vertices and all two-level shape nestings. Returns false and
// fills *witness on the first discrepancy.
bool check_coassociativity(int n_ext, int D, int max_edges, bool with_tadpoles, std::string* witness);

// Compatibility of d_gra with the coaction: coact(d g) = (d (x) id + id (x) d) coact(g)
// over all ^*Gra_V(n_ext) graphs with <= max_edges edges and <= max_decorations
// decorations.
bool check_gra_comodule_compat(const PDAlgebra& algebra, int n_ext, int max_edges, int max_decorations,
                               std::string* witness);

} // namespace confgc
