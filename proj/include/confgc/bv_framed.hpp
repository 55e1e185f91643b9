#pragma once

#include <string>
#include <vector>

#include "confgc/complexes.hpp"

namespace confgc {

// Framed D=2 graph complexes. G(n, k) is the subcomplex of ^*BVGraphs with
// n framed external slots (tadpoles allowed) and k unframed slots; internal
// tadpoles are zero.
ComplexFlavor bv_flavor(const PDAlgebra& surface, const GCElement& mc, int n_framed, int k_unframed);

GradedComplex build_bv(const PDAlgebra& surface, const GCElement& mc, int n_framed, int k_unframed,
                       int deg_min, int deg_max, int k_max_internal, int workers = 1);

BettiTable bv_betti(const PDAlgebra& surface, const GCElement& mc, int n_framed, int deg_min, int deg_max,
                    int k_max_internal, int k_probe, int workers = 1);

// Cohomology representatives of the k-truncated complex at one degree, as
// coordinate vectors in the degree's truncated basis.
struct CohomologyBasis {
    std::vector<std::vector<Rational>> reps;
    long dim() const { return static_cast<long>(reps.size()); }
};
CohomologyBasis cohomology_basis(const GradedComplex& cx, int degree, int k_cap);

// im(first) == ker(second) for a pair of composable cohomology maps given as
// dense column-major matrices; middle_dim columns/rows as appropriate.
struct ExactnessCheck {
    bool composite_zero = false;
    long rank_in = 0;
    long rank_out = 0;
    long middle_dim = 0;
    bool exact() const { return composite_zero && rank_in + rank_out == middle_dim; }
};
ExactnessCheck exactness_of_pair(const std::vector<std::vector<Rational>>& map_in,
                                 const std::vector<std::vector<Rational>>& map_out, long middle_dim);

struct LESNode {
    std::string at; // which cohomology group the node sits at
    int degree = 0;
    ExactnessCheck check;
};

struct LESReport {
    bool stabilized = true;
    bool all_exact = true;
    std::vector<LESNode> nodes;
    std::vector<long> betti_big;   // H(G(n+1, k-1)) in the window
    std::vector<long> betti_small; // H(G(n, k)) in the window
    int deg_min = 0, deg_max = 0;
};

// Realizes the maps f (strip the tadpole at slot n+1), wedge-e (decorate slot
// n+1 with the Euler form) and i_* (inclusion) on the computed cohomology and
// verifies exactness of
//   -> H^d G(n+1,k-1) -f-> H^{d-1} G(n,k) -e-> H^{d+1} G(n,k) -i-> H^{d+1} G(n+1,k-1) ->
// at every node inside the stabilized window. Throws NotStabilized when the
// truncation is not provably converged in the window.
LESReport les_check(const PDAlgebra& surface, const GCElement& mc, int n, int k, int deg_min, int deg_max,
                    int k_max_internal, int k_probe, int workers = 1);

} // namespace confgc
