#include "confgc/enumerate.hpp"

#include <algorithm>

#include "confgc/errors.hpp"

namespace confgc {

std::vector<int> vertex_valences(const DecoratedGraph& g) {
    std::vector<int> val(static_cast<size_t>(g.n_vertices()), 0);
    for (const Edge& e : g.edges) {
        val[static_cast<size_t>(e.tail)]++;
        val[static_cast<size_t>(e.head)]++;
    }
    for (const Decoration& d : g.decorations) val[static_cast<size_t>(d.vertex)]++;
    return val;
}

namespace {

struct Enumerator {
    int n_ext;
    int k_int;
    int D;
    const EnumConstraints* cons;
    const PDAlgebra* algebra;
    int target_degree;
    std::vector<int> basis_degrees; // non-unit basis degrees, for budgets
    std::vector<int> dec_basis;     // indices of usable (non-unit) basis elements
    int min_dec_degree = 0;

    std::vector<std::pair<int, int>> pairs; // (tail, head) in lex order
    std::vector<DecoratedGraph> out;

    int n_vertices() const { return n_ext + k_int; }

    bool tadpole_ok(int v) const {
        if (v < n_ext)
            return v < static_cast<int>(cons->ext_tadpole_ok.size()) && cons->ext_tadpole_ok[static_cast<size_t>(v)];
        return cons->int_tadpole_ok && (D % 2 == 0);
    }

    void run() {
        const int V = n_vertices();
        for (int t = 0; t < V; ++t) {
            if (tadpole_ok(t)) pairs.push_back({t, t});
            for (int h = t + 1; h < V; ++h) pairs.push_back({t, h});
        }
        // Degree determines the decoration budget for each edge count.
        // dec_total = degree - (D-1) E + D k  must be >= 0 (and 0 if
        // undecorated).
        int e_max = 0;
        if (D >= 2) {
            e_max = (target_degree + D * k_int) / (D - 1);
        } else {
            throw ConfigError("ambient dimension must be >= 2");
        }
        if (e_max < 0) return;
        for (int E = 0; E <= e_max; ++E) {
            int dec_total = target_degree - (D - 1) * E + D * k_int;
            if (dec_total < 0) continue;
            if (dec_total > 0 && (algebra == nullptr || dec_basis.empty())) continue;
            edges.clear();
            valence.assign(static_cast<size_t>(V), 0);
            place_edges(0, E, dec_total);
        }
        std::vector<std::pair<std::vector<int>, size_t>> keyed;
        keyed.reserve(out.size());
        for (size_t i = 0; i < out.size(); ++i) keyed.push_back({out[i].encoding(), i});
        std::sort(keyed.begin(), keyed.end());
        std::vector<DecoratedGraph> sorted;
        sorted.reserve(out.size());
        for (auto& [enc, i] : keyed) sorted.push_back(std::move(out[i]));
        out = std::move(sorted);
    }

    std::vector<Edge> edges;
    std::vector<int> valence; // edge valence while placing (tadpole counts 2)

    int max_extra_decorations(int dec_budget) const {
        return min_dec_degree > 0 ? dec_budget / min_dec_degree : 0;
    }

    // Vertices are finalized in increasing order: once pair generation has
    // moved past all pairs with tail <= v, the edge valence of v is final.
    bool vertex_final_ok(int v, int dec_budget) const {
        if (v < n_ext) return true;
        int val = valence[static_cast<size_t>(v)];
        if (cons->forbid_internal_only_components && val == 0) return false;
        if (val + max_extra_decorations(dec_budget) < cons->min_internal_valence) return false;
        return true;
    }

    void place_edges(size_t pair_idx, int remaining, int dec_budget) {
        if (remaining == 0) {
            for (int v = 0; v < n_vertices(); ++v)
                if (!vertex_final_ok(v, dec_budget)) return;
            finish_undecorated(dec_budget);
            return;
        }
        if (pair_idx >= pairs.size()) return;
        auto [t, h] = pairs[pair_idx];
        // Once the tail advances past t, the edge valence of t is final (pairs
        // are in lex order, so every pair touching t has tail <= t).
        const bool tail_advances = (pair_idx + 1 >= pairs.size()) || pairs[pair_idx + 1].first != t;
        // Even D: odd edge generators square to zero, so multiplicity <= 1.
        const int max_mult = (D % 2 == 0) ? 1 : remaining;
        for (int mult = 0; mult <= max_mult && mult <= remaining; ++mult) {
            if (mult > 0) {
                edges.push_back({t, h});
                valence[static_cast<size_t>(t)] += (t == h) ? 2 : 1;
                if (t != h) valence[static_cast<size_t>(h)]++;
            }
            if (!tail_advances || vertex_final_ok(t, dec_budget))
                place_edges(pair_idx + 1, remaining - mult, dec_budget);
        }
        while (!edges.empty() && edges.back().tail == t && edges.back().head == h) {
            valence[static_cast<size_t>(t)] -= (t == h) ? 2 : 1;
            if (t != h) valence[static_cast<size_t>(h)]--;
            edges.pop_back();
        }
    }

    void finish_undecorated(int dec_budget) {
        DecoratedGraph g{n_ext, k_int, D, edges, {}};
        int n_comp = 0;
        std::vector<int> comp = connected_components(g, &n_comp);
        if (cons->connected_required && n_comp != 1) return;
        if (cons->forbid_internal_only_components) {
            std::vector<bool> has_ext(static_cast<size_t>(n_comp), false);
            for (int v = 0; v < n_ext; ++v) has_ext[static_cast<size_t>(comp[static_cast<size_t>(v)])] = true;
            for (int v = n_ext; v < n_vertices(); ++v)
                if (!has_ext[static_cast<size_t>(comp[static_cast<size_t>(v)])]) return;
        }
        if (cons->genus_cap && loop_order(g) > *cons->genus_cap) return;
        if (dec_budget == 0) {
            accept(g);
            return;
        }
        decorations.clear();
        decorate_vertex(g, 0, dec_budget);
    }

    std::vector<Decoration> decorations;

    void decorate_vertex(DecoratedGraph& g, int v, int budget) {
        if (v == n_vertices()) {
            if (budget != 0) return;
            g.decorations = decorations;
            accept(g);
            g.decorations.clear();
            return;
        }
        // Remaining vertices can absorb the budget only through decorations.
        choose_multiset(g, v, 0, budget, 0);
    }

    // Sorted multiset of decorations at v starting from basis position `from`.
    void choose_multiset(DecoratedGraph& g, int v, size_t from, int budget, int count) {
        // close this vertex
        bool valence_ok = true;
        if (g.is_internal(v) && valence[static_cast<size_t>(v)] + count < cons->min_internal_valence)
            valence_ok = false;
        if (valence_ok) decorate_vertex(g, v + 1, budget);
        if (budget <= 0) return;
        for (size_t i = from; i < dec_basis.size(); ++i) {
            int b = dec_basis[i];
            int deg = algebra->basis_degree(b);
            if (deg > budget) continue;
            // odd-degree decorations square to zero at a vertex
            if (deg % 2 != 0 && !decorations.empty() && decorations.back().vertex == v &&
                decorations.back().basis == b)
                continue;
            decorations.push_back({v, b});
            choose_multiset(g, v, i, budget - deg, count + 1);
            decorations.pop_back();
        }
    }

    void accept(const DecoratedGraph& g) {
        CanonResult c = canonicalize(g, algebra ? algebra->degrees() : std::vector<int>{});
        if (c.zero) return;
        if (!(c.graph == g)) return; // keep only canonical representatives
        // identity labeling realizes the canonical form with sign +1, so
        // c.sign == 1 here unless an odd symmetry zeroed it (handled above)
        out.push_back(c.graph);
    }
};

} // namespace

std::vector<DecoratedGraph> enumerate_graphs(int n_ext, int D, const EnumConstraints& constraints,
                                             int k_int, int degree, const PDAlgebra* algebra) {
    Enumerator e;
    e.n_ext = n_ext;
    e.k_int = k_int;
    e.D = D;
    e.cons = &constraints;
    e.algebra = algebra;
    e.target_degree = degree;
    if (algebra) {
        for (int b = 0; b < algebra->n_basis(); ++b) {
            if (b == algebra->unit()) continue;
            if (algebra->basis_degree(b) < 1) continue;
            e.dec_basis.push_back(b);
            if (e.min_dec_degree == 0 || algebra->basis_degree(b) < e.min_dec_degree)
                e.min_dec_degree = algebra->basis_degree(b);
        }
    }
    e.run();
    return e.out;
}

} // namespace confgc
