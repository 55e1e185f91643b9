#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confgc/enumerate.hpp"
#include "confgc/gc_lie.hpp"
#include "confgc/graph.hpp"
#include "confgc/operad.hpp"
#include "confgc/pd_algebra.hpp"
#include "confgc/sparse_matrix.hpp"

namespace confgc {

enum class FlavorKind {
    GraphsD,           // Kontsevich cooperad: no decorations, trivalent internal
    GraphsM,           // the full twisted comodule with the partition-function cut
    GraphsM_NoTadpole, // tadpole-free variant (non-parallelizable case)
    GraphsM_Reduced,   // quotient by <3-valent internal vertices
    GraphsM_Forest,    // genus-zero subcomplex of the reduced model
    BV,                // framed D=2 complexes G(n, k)
};

std::string flavor_name(FlavorKind kind);
std::optional<FlavorKind> flavor_from_name(const std::string& name);

struct ComplexFlavor {
    FlavorKind kind = FlavorKind::GraphsD;
    int D = 2;
    const PDAlgebra* algebra = nullptr; // null for GraphsD
    GCElement mc;                       // MC element for the Z-cut (M flavors)
    int bv_framed_count = 0;            // BV: external slots 0..n-1 allow tadpoles

    bool uses_algebra() const { return kind != FlavorKind::GraphsD; }
    std::vector<int> basis_degrees() const;
    EnumConstraints constraints(int n_ext) const;
    bool admits_basis_graph(const DecoratedGraph& g) const;
    // The MC element actually used by the differential (>=3-valent part for
    // the reduced flavors).
    const GCElement& effective_mc() const;

    void init(); // validates the combination and prepares effective_mc
  private:
    GCElement mc_effective_;
};

ComplexFlavor make_flavor(FlavorKind kind, const PDAlgebra* algebra, const GCElement* mc, int D,
                          int bv_framed_count = 0);

// The full differential of the flavor: d_split + d_contr with the
// partition-function cut, projected to the flavor's basis span.
GraphSum d_graphs(const DecoratedGraph& g, const ComplexFlavor& flavor);

struct GradedComplex {
    ComplexFlavor flavor;
    int n_ext = 0;
    int k_max = 0;
    int deg_lo = 0; // enumerated range (reported window extended by 1 each way)
    int deg_hi = 0;
    std::map<int, std::vector<DecoratedGraph>> basis;
    std::map<int, SparseRationalMatrix> diff; // d : C^deg -> C^{deg+1}

    long dim(int degree, int k_cap = -1) const;
    std::vector<long> columns_with_k_at_most(int degree, int k_cap) const;
};

// Enumerates bases for all internal-vertex counts <= k_max in the extended
// window, assembles the differential matrices and verifies d*d = 0 exactly.
// When top_k_cap >= 0, the top extension layer (degree deg_max + 1) is only
// enumerated up to that internal count and the top differential is assembled
// on those columns; sound because the differential never raises the internal
// count, and it is all the Betti machinery reads there.
GradedComplex build_complex(const ComplexFlavor& flavor, int n_ext, int deg_min, int deg_max, int k_max,
                            int workers = 1, int top_k_cap = -1);

// Betti numbers of the truncated complex: the reported value in degree d is
// the rank of the comparison map H^d(C_{<=k_max}) -> H^d(C_{<=k_probe}), which
// converges to the true Betti number (plain truncations do not). Flags record
// stability of that rank under lowering k_max or k_probe by one.
BettiTable betti(const ComplexFlavor& flavor, int n_ext, int deg_min, int deg_max, int k_max, int k_probe,
                 int workers = 1);
BettiTable betti_of_built(const GradedComplex& probe, int deg_min, int deg_max, int k_max);

// The plain Betti numbers of the probe truncation are diagnostics and cost a
// full-rank elimination of the top differential; they are filled only when
// this is enabled (default off for large complexes).


// De-insertion coaction lifted to the twisted complexes; internal vertices
// distribute over the factors, the ^*Graphs_D factors stay undecorated.
TensorSum coact_graphs(const DecoratedGraph& g, const ComplexFlavor& flavor, const CocompositionShape& shape);

// coact_graphs(d g) = (d (x) id + id (x) d) coact_graphs(g) over all flavor
// basis graphs with <= max_internal internal vertices and <= max_edges edges.
bool check_graphs_comodule_compat(const ComplexFlavor& flavor, int n_ext, int max_internal, int max_edges,
                                  std::string* witness);

// Loop-order monotonicity: every term of d_graphs(g) has loop order <= that
// of g, over the same sample.
bool check_loop_order_monotone(const ComplexFlavor& flavor, int n_ext, int max_internal, int max_edges,
                               std::string* witness);

} // namespace confgc
