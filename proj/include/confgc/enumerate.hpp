#pragma once

#include <optional>
#include <vector>

#include "confgc/graph.hpp"
#include "confgc/pd_algebra.hpp"

namespace confgc {

struct EnumConstraints {
    int min_internal_valence = 0;      // edges + decorations (tadpoles count twice)
    std::vector<bool> ext_tadpole_ok;  // per external slot; empty means none allowed
    bool int_tadpole_ok = false;
    bool forbid_internal_only_components = true;
    std::optional<int> genus_cap;      // loop_order <= cap
    bool connected_required = false;   // for GC-style enumeration (n_ext = 0)
};

// Complete duplicate-free list of canonical graphs with the given number of
// external/internal vertices and ^*-degree, under the constraints; graphs that
// vanish by symmetry are excluded. `algebra` may be null (no decorations).
// Output is sorted by encoding.
std::vector<DecoratedGraph> enumerate_graphs(int n_ext, int D, const EnumConstraints& constraints,
                                             int k_int, int degree, const PDAlgebra* algebra);

// Per-vertex valence counting edges (tadpoles twice) and decorations.
std::vector<int> vertex_valences(const DecoratedGraph& g);

} // namespace confgc
