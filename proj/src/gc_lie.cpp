#include "confgc/gc_lie.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "confgc/enumerate.hpp"
#include "confgc/errors.hpp"
#include "confgc/operad.hpp"
#include "confgc/sparse_matrix.hpp"

namespace confgc {

using ordered_json = nlohmann::ordered_json;

int gc_degree(const DecoratedGraph& g, const std::vector<int>& basis_degrees) {
    return -star_degree(g, basis_degrees);
}

std::optional<int> gc_degree_of(const GCElement& x) {
    std::optional<int> deg;
    for (const auto& [g, c] : x.terms) {
        int d = gc_degree(g, x.algebra->degrees());
        if (deg && *deg != d) return std::nullopt;
        deg = d;
    }
    return deg;
}

Rational evaluate_partition_function(const DecoratedGraph& g, const GCElement& z) {
    if (g.n_ext != 0) throw FlavorViolation("partition function evaluates graphs without external vertices");
    const auto& degrees = z.algebra->degrees();
    if (g.n_int == 0) return Rational(1); // empty graph: Z is an algebra map
    CutResult cut = cut_internal_components(g, degrees);
    Rational value(cut.sign);
    for (const DecoratedGraph& comp : cut.cut) {
        CanonResult c = canonicalize(comp, degrees);
        if (c.zero) return Rational(0);
        auto it = z.terms.find(c.graph);
        if (it == z.terms.end()) return Rational(0);
        value *= it->second * c.sign;
    }
    return value;
}

GCElement z0(const PDAlgebra& algebra) {
    GCElement z;
    z.algebra = &algebra;
    const int D = algebra.dimension();
    std::vector<int> usable;
    for (int b = 0; b < algebra.n_basis(); ++b)
        if (b != algebra.unit() && algebra.basis_degree(b) >= 1) usable.push_back(b);
    // Sorted multisets of total degree D.
    std::vector<int> multiset;
    std::function<void(size_t, int)> rec = [&](size_t from, int budget) {
        if (budget == 0 && !multiset.empty()) {
            Rational eps = algebra.counit_of_product(multiset);
            if (eps != 0) {
                DecoratedGraph g;
                g.n_ext = 0;
                g.n_int = 1;
                g.ambient_dim = D;
                for (int b : multiset) g.decorations.push_back({0, b});
                add_term(z.terms, g, eps, algebra.degrees());
            }
            return;
        }
        for (size_t i = from; i < usable.size(); ++i) {
            int deg = algebra.basis_degree(usable[i]);
            if (deg > budget) continue;
            if (deg % 2 != 0 && !multiset.empty() && multiset.back() == usable[i]) continue;
            multiset.push_back(usable[i]);
            rec(i, budget - deg);
            multiset.pop_back();
        }
    };
    rec(0, D);
    return z;
}

namespace {

// Coefficient of `target` (canonical) inside a GraphSum.
Rational coeff_of(const GraphSum& sum, const DecoratedGraph& target) {
    auto it = sum.find(target);
    return it == sum.end() ? Rational(0) : it->second;
}

int n_components_of(const DecoratedGraph& g) {
    int n = 0;
    connected_components(g, &n);
    return n;
}

// All ways to split vertex v of gamma into v and a fresh vertex joined by a
// new edge (appended last), distributing the incident edge-ends and
// decorations. Only used to enumerate candidate graphs; exact coefficients are
// recovered through the adjoint.
bool has_tadpole(const DecoratedGraph& g) {
    for (const Edge& e : g.edges)
        if (e.tail == e.head) return true;
    return false;
}

void split_vertex_candidates(const DecoratedGraph& gamma, int v, const std::vector<int>& degrees,
                             std::set<DecoratedGraph>& out) {
    std::vector<std::pair<size_t, int>> ends; // (edge index, 0 = tail / 1 = head)
    for (size_t t = 0; t < gamma.edges.size(); ++t) {
        if (gamma.edges[t].tail == v) ends.push_back({t, 0});
        if (gamma.edges[t].head == v) ends.push_back({t, 1});
    }
    std::vector<size_t> decs;
    for (size_t i = 0; i < gamma.decorations.size(); ++i)
        if (gamma.decorations[i].vertex == v) decs.push_back(i);
    const size_t n_items = ends.size() + decs.size();
    const int fresh = gamma.n_vertices();
    for (size_t mask = 0; mask < (size_t{1} << n_items); ++mask) {
        DecoratedGraph h = gamma;
        h.n_int += 1;
        for (size_t i = 0; i < ends.size(); ++i) {
            if (!((mask >> i) & 1)) continue;
            if (ends[i].second == 0)
                h.edges[ends[i].first].tail = fresh;
            else
                h.edges[ends[i].first].head = fresh;
        }
        for (size_t i = 0; i < decs.size(); ++i) {
            if (!((mask >> (ends.size() + i)) & 1)) continue;
            h.decorations[decs[i]].vertex = fresh;
        }
        h.edges.push_back({v, fresh});
        CanonResult c = canonicalize(h, degrees);
        if (!c.zero) out.insert(c.graph);
    }
}

// All ways to create an edge by consuming two decorations, one decoration
// (the other diagonal leg being the reduced unit), or none; candidates only,
// the adjoint recovers exact coefficients.
void join_candidates(const DecoratedGraph& gamma, const std::vector<int>& degrees,
                     std::set<DecoratedGraph>& out) {
    for (size_t p = 0; p < gamma.decorations.size(); ++p)
        for (size_t q = p + 1; q < gamma.decorations.size(); ++q) {
            DecoratedGraph h = gamma;
            int vp = gamma.decorations[p].vertex, vq = gamma.decorations[q].vertex;
            h.decorations.erase(h.decorations.begin() + static_cast<long>(q));
            h.decorations.erase(h.decorations.begin() + static_cast<long>(p));
            h.edges.push_back({vp, vq});
            CanonResult c = canonicalize(h, degrees);
            if (!c.zero) out.insert(c.graph);
        }
    for (size_t p = 0; p < gamma.decorations.size(); ++p)
        for (int v = 0; v < gamma.n_vertices(); ++v) {
            DecoratedGraph h = gamma;
            int vp = gamma.decorations[p].vertex;
            h.decorations.erase(h.decorations.begin() + static_cast<long>(p));
            h.edges.push_back({vp, v});
            CanonResult c = canonicalize(h, degrees);
            if (!c.zero) out.insert(c.graph);
        }
    for (int u = 0; u < gamma.n_vertices(); ++u)
        for (int v = u; v < gamma.n_vertices(); ++v) {
            DecoratedGraph h = gamma;
            h.edges.push_back({u, v});
            CanonResult c = canonicalize(h, degrees);
            if (!c.zero) out.insert(c.graph);
        }
}

// Connect the disjoint union of a and b by one edge, consuming a decoration
// on zero, one or both sides (unit diagonal legs are reduced away). Candidates
// only, the adjoint recovers exact coefficients.
void bracket_candidates(const DecoratedGraph& a, const DecoratedGraph& b, const std::vector<int>& degrees,
                        std::set<DecoratedGraph>& out) {
    DecoratedGraph u; // disjoint union, b's vertices shifted
    u.n_ext = 0;
    u.n_int = a.n_int + b.n_int;
    u.ambient_dim = a.ambient_dim;
    u.edges = a.edges;
    for (const Edge& e : b.edges) u.edges.push_back({e.tail + a.n_int, e.head + a.n_int});
    u.decorations = a.decorations;
    for (const Decoration& d : b.decorations) u.decorations.push_back({d.vertex + a.n_int, d.basis});
    const size_t na = a.decorations.size();
    auto emit = [&](DecoratedGraph h) {
        CanonResult c = canonicalize(h, degrees);
        if (!c.zero) out.insert(c.graph);
    };
    for (size_t p = 0; p < na; ++p)
        for (size_t q = na; q < u.decorations.size(); ++q) {
            DecoratedGraph h = u;
            int vp = u.decorations[p].vertex, vq = u.decorations[q].vertex;
            h.decorations.erase(h.decorations.begin() + static_cast<long>(q));
            h.decorations.erase(h.decorations.begin() + static_cast<long>(p));
            h.edges.push_back({vp, vq});
            emit(std::move(h));
        }
    for (size_t p = 0; p < u.decorations.size(); ++p) {
        const bool from_a = p < na;
        for (int v = 0; v < u.n_int; ++v) {
            // connect to a vertex of the other factor
            if (from_a == (v < a.n_int)) continue;
            DecoratedGraph h = u;
            int vp = u.decorations[p].vertex;
            h.decorations.erase(h.decorations.begin() + static_cast<long>(p));
            h.edges.push_back({vp, v});
            emit(std::move(h));
        }
    }
    for (int va = 0; va < a.n_int; ++va)
        for (int vb = a.n_int; vb < u.n_int; ++vb) {
            DecoratedGraph h = u;
            h.edges.push_back({va, vb});
            emit(std::move(h));
        }
}

GraphSum star_differential(const DecoratedGraph& g, const PDAlgebra& algebra) {
    GraphSum d = d_split(g, algebra);
    add_sum(d, d_contr(g, algebra.degrees()));
    return d;
}

// Evaluation of the two-component terms of d(gamma) against homogeneous x, y:
// sum over the terms c * (A | B) of c * sigma * [ (-1)^{|y||A|} x(A) y(B) +
// (-1)^{|x||A|} y(A) x(B) ].
Rational pair_eval(const GraphSum& dgamma, const GCElement& x, const GCElement& y, int deg_x, int deg_y,
                   const std::vector<int>& degrees) {
    Rational total(0);
    for (const auto& [t, c] : dgamma) {
        if (n_components_of(t) != 2) continue;
        CutResult cut = cut_internal_components(t, degrees);
        if (cut.cut.size() != 2) continue;
        CanonResult ca = canonicalize(cut.cut[0], degrees);
        CanonResult cb = canonicalize(cut.cut[1], degrees);
        if (ca.zero || cb.zero) continue;
        Rational xa = coeff_of(x.terms, ca.graph) * ca.sign;
        Rational yb = coeff_of(y.terms, cb.graph) * cb.sign;
        Rational ya = coeff_of(y.terms, ca.graph) * ca.sign;
        Rational xb = coeff_of(x.terms, cb.graph) * cb.sign;
        // Fold evaluation of x (x) y against the two-component terms; the
        // Koszul pattern is pinned by the Maurer-Cartan identity
        // d z + 1/2 [z, z] = 0 and the shifted Jacobi identity.
        long xy = static_cast<long>(deg_x) * deg_y;
        Rational contrib = Rational(neg_one_pow(deg_x)) * xa * yb +
                           Rational(neg_one_pow(xy + deg_x)) * ya * xb;
        total += c * Rational(cut.sign) * contrib;
    }
    return total;
}

// Connected-terms evaluation of x against d(gamma).
Rational connected_eval(const GraphSum& dgamma, const GCElement& x, const std::vector<int>& degrees) {
    Rational total(0);
    for (const auto& [t, c] : dgamma) {
        if (n_components_of(t) != 1) continue;
        total += c * coeff_of(x.terms, t);
    }
    return total;
}

std::vector<std::pair<int, GCElement>> homogeneous_pieces(const GCElement& x) {
    std::map<int, GCElement> pieces;
    for (const auto& [g, c] : x.terms) {
        int d = gc_degree(g, x.algebra->degrees());
        auto& piece = pieces[d];
        piece.algebra = x.algebra;
        piece.terms[g] = c;
    }
    return {pieces.begin(), pieces.end()};
}

} // namespace

GCElement bracket(const GCElement& x, const GCElement& y) {
    if (x.algebra != y.algebra && !(x.algebra && y.algebra && x.algebra->same_as(*y.algebra)))
        throw AlgebraMismatch("bracket arguments live over different algebras");
    GCElement out;
    out.algebra = x.algebra;
    if (x.terms.empty() || y.terms.empty()) return out;
    const auto& degrees = x.algebra->degrees();
    for (const auto& [dx, px] : homogeneous_pieces(x))
        for (const auto& [dy, py] : homogeneous_pieces(y)) {
            std::set<DecoratedGraph> candidates;
            for (const auto& [ga, ca] : px.terms)
                for (const auto& [gb, cb] : py.terms) {
                    bracket_candidates(ga, gb, degrees, candidates);
                    bracket_candidates(gb, ga, degrees, candidates);
                }
            const bool tadpoles_ok = x.algebra->euler_characteristic() == 0;
            for (const DecoratedGraph& gamma : candidates) {
                if (!tadpoles_ok && has_tadpole(gamma)) continue;
                GraphSum dgamma = d_split(gamma, *x.algebra);
                Rational c = pair_eval(dgamma, px, py, dx, dy, degrees);
                if (c != 0) {
                    Rational& slot = out.terms[gamma];
                    slot += c;
                    if (slot == 0) out.terms.erase(gamma);
                }
            }
        }
    return out;
}

GCElement d_gc(const GCElement& x, const GCElement* twist) {
    GCElement out;
    out.algebra = x.algebra;
    if (!x.terms.empty()) {
        const auto& degrees = x.algebra->degrees();
        const bool tadpoles_ok = x.algebra->euler_characteristic() == 0;
        std::set<DecoratedGraph> candidates;
        for (const auto& [g, c] : x.terms) {
            for (int v = 0; v < g.n_vertices(); ++v) split_vertex_candidates(g, v, degrees, candidates);
            join_candidates(g, degrees, candidates);
        }
        for (const DecoratedGraph& gamma : candidates) {
            if (!tadpoles_ok && has_tadpole(gamma)) continue;
            Rational c = connected_eval(star_differential(gamma, *x.algebra), x, degrees);
            if (c != 0) out.terms[gamma] = c;
        }
    }
    if (twist) {
        GCElement tw = bracket(*twist, x);
        for (const auto& [g, c] : tw.terms) {
            Rational& slot = out.terms[g];
            slot += c;
            if (slot == 0) out.terms.erase(g);
        }
    }
    return out;
}

MCReport check_mc(const GCElement& z, const MCBox& box) {
    MCReport report;
    report.box = box;
    const PDAlgebra& A = *z.algebra;
    EnumConstraints cons;
    cons.forbid_internal_only_components = false;
    cons.connected_required = true;
    // Tadpole test graphs carry the chi(A) obstruction and belong to the
    // graph complex only when it vanishes.
    cons.int_tadpole_ok = A.euler_characteristic() == 0;
    cons.genus_cap = box.max_loop_order;
    // Residual coefficients live on connected test graphs of ^*-degree -1.
    for (int k = 1; k <= box.max_vertices; ++k) {
        for (const DecoratedGraph& gamma : enumerate_graphs(0, A.dimension(), cons, k, -1, &A)) {
            GraphSum dgamma = star_differential(gamma, A);
            Rational residual(0);
            for (const auto& [t, c] : dgamma) residual += c * evaluate_partition_function(t, z);
            if (residual != 0) report.residual[gamma] = residual;
        }
    }
    report.holds = report.residual.empty();
    return report;
}

std::vector<std::pair<int, GCElement>> loop_decompose(const GCElement& z) {
    std::map<int, GCElement> pieces;
    for (const auto& [g, c] : z.terms) {
        auto& piece = pieces[loop_order(g)];
        piece.algebra = z.algebra;
        piece.terms[g] = c;
    }
    return {pieces.begin(), pieces.end()};
}

ValenceFilterResult filter_valence(const GCElement& z, ValenceMode mode) {
    ValenceFilterResult res;
    res.kept.algebra = z.algebra;
    res.rejected.algebra = z.algebra;
    for (const auto& [g, c] : z.terms) {
        std::vector<int> val = vertex_valences(g);
        bool keep = false;
        if (mode == ValenceMode::GE3) {
            keep = std::all_of(val.begin(), val.end(), [](int v) { return v >= 3; });
        } else {
            bool no_univalent = std::all_of(val.begin(), val.end(), [](int v) { return v != 1; });
            bool has_trivalent = std::any_of(val.begin(), val.end(), [](int v) { return v >= 3; });
            keep = no_univalent && has_trivalent;
        }
        (keep ? res.kept : res.rejected).terms[g] = c;
    }
    return res;
}

GCElement ihx_normal_form(const GCElement& z) {
    GCElement out;
    out.algebra = z.algebra;
    if (z.terms.empty()) return out;
    const auto& degrees = z.algebra->degrees();
    for (const auto& [g, c] : z.terms) {
        if (loop_order(g) != 0 || n_components_of(g) != 1) throw NotATree("ihx_normal_form input has a loop or is disconnected");
        for (int v : vertex_valences(g))
            if (v < 3) throw NotATree("ihx_normal_form input has a <3-valent vertex");
    }
    // Group terms by (vertex count, sorted decoration multiset); relations are
    // generated inside each group by splitting the 4-valent vertex of the
    // one-smaller trees.
    std::map<std::vector<int>, GraphSum> groups;
    for (const auto& [g, c] : z.terms) {
        std::vector<int> key;
        key.push_back(g.n_int);
        std::vector<int> basis;
        for (const Decoration& d : g.decorations) basis.push_back(d.basis);
        std::sort(basis.begin(), basis.end());
        key.insert(key.end(), basis.begin(), basis.end());
        groups[key][g] = c;
    }
    for (const auto& [key, sum] : groups) {
        const int V = key.front();
        // Trivalent trees with this decoration multiset: enumerate all trees,
        // keep canonical all-trivalent ones. Reuse: candidates from the sum's
        // graphs plus everything reachable by IHX; simplest is enumerating by
        // degree.
        const DecoratedGraph& sample = sum.begin()->first;
        const int degree = star_degree(sample, degrees);
        EnumConstraints cons;
        cons.forbid_internal_only_components = false;
        cons.connected_required = true;
        cons.genus_cap = 0;
        cons.min_internal_valence = 3;
        std::vector<DecoratedGraph> all = enumerate_graphs(0, sample.ambient_dim, cons, V, degree, z.algebra);
        // Restrict to exactly-trivalent trees with the same decoration multiset.
        std::vector<DecoratedGraph> basis_graphs;
        for (const DecoratedGraph& g : all) {
            std::vector<int> val = vertex_valences(g);
            if (!std::all_of(val.begin(), val.end(), [](int v) { return v == 3; })) continue;
            std::vector<int> b;
            for (const Decoration& d : g.decorations) b.push_back(d.basis);
            std::sort(b.begin(), b.end());
            std::vector<int> want(key.begin() + 1, key.end());
            if (b == want) basis_graphs.push_back(g);
        }
        std::map<DecoratedGraph, long> index;
        for (size_t i = 0; i < basis_graphs.size(); ++i) index[basis_graphs[i]] = static_cast<long>(i);

        // Relations: for every tree with one 4-valent vertex (others
        // trivalent), split the 4-valent vertex; the trivalent part of the
        // image is an IHX relation.
        std::vector<DecoratedGraph> relators;
        if (V >= 2) {
            // relators sit one (star-)degree above: their differential lands
            // on the trivalent trees
            EnumConstraints rcons = cons;
            relators = enumerate_graphs(0, sample.ambient_dim, rcons, V - 1, degree + 1, z.algebra);
        }
        std::vector<Triplet> rel_entries;
        long n_rel = 0;
        for (const DecoratedGraph& tau : relators) {
            std::vector<int> val = vertex_valences(tau);
            int n4 = 0;
            bool ok = true;
            for (int v : val) {
                if (v == 4)
                    ++n4;
                else if (v != 3)
                    ok = false;
            }
            if (!ok || n4 != 1) continue;
            std::vector<int> b;
            for (const Decoration& d : tau.decorations) b.push_back(d.basis);
            std::sort(b.begin(), b.end());
            std::vector<int> want(key.begin() + 1, key.end());
            if (b != want) continue;
            // Trivalent image of d_gc restricted to vertex splitting.
            GCElement unit;
            unit.algebra = z.algebra;
            unit.terms[tau] = 1;
            GCElement dtau = d_gc(unit);
            bool nonzero = false;
            for (const auto& [g, c] : dtau.terms) {
                auto it = index.find(g);
                if (it == index.end()) continue; // non-trivalent or wrong multiset pieces are not part of the relation
                rel_entries.push_back({it->second, n_rel, c});
                nonzero = true;
            }
            if (nonzero) ++n_rel;
        }
        // Reduce the coefficient vector modulo the column span of relations:
        // prefer eliminating lexicographically small graphs, keeping the
        // tail (combed) span.
        std::vector<Rational> vec(basis_graphs.size(), Rational(0));
        for (const auto& [g, c] : sum) vec[static_cast<size_t>(index.at(g))] = c;
        if (n_rel > 0) {
            // Gaussian elimination of the relation matrix by rows top-down.
            std::vector<std::map<long, Rational>> cols(static_cast<size_t>(n_rel));
            for (const auto& t : rel_entries) cols[static_cast<size_t>(t.col)][t.row] = t.value;
            std::vector<bool> used(static_cast<size_t>(n_rel), false);
            for (long r = 0; r < static_cast<long>(basis_graphs.size()); ++r) {
                long pc = -1;
                for (long c = 0; c < n_rel; ++c) {
                    if (used[static_cast<size_t>(c)]) continue;
                    auto it = cols[static_cast<size_t>(c)].find(r);
                    if (it != cols[static_cast<size_t>(c)].end() &&
                        cols[static_cast<size_t>(c)].begin()->first == r && it->second != 0) {
                        pc = c;
                        break;
                    }
                }
                if (pc < 0) continue;
                used[static_cast<size_t>(pc)] = true;
                // eliminate row r from the other columns
                Rational piv = cols[static_cast<size_t>(pc)].at(r);
                for (long c = 0; c < n_rel; ++c) {
                    if (c == pc) continue;
                    auto it = cols[static_cast<size_t>(c)].find(r);
                    if (it == cols[static_cast<size_t>(c)].end() || it->second == 0) continue;
                    Rational f = it->second / piv;
                    for (const auto& [rr, vv] : cols[static_cast<size_t>(pc)]) {
                        Rational& slot = cols[static_cast<size_t>(c)][rr];
                        slot -= f * vv;
                        if (slot == 0) cols[static_cast<size_t>(c)].erase(rr);
                    }
                }
                // and from the vector
                if (vec[static_cast<size_t>(r)] != 0) {
                    Rational f = vec[static_cast<size_t>(r)] / piv;
                    for (const auto& [rr, vv] : cols[static_cast<size_t>(pc)])
                        vec[static_cast<size_t>(rr)] -= f * vv;
                }
            }
        }
        for (size_t i = 0; i < basis_graphs.size(); ++i)
            if (vec[i] != 0) out.terms[basis_graphs[i]] = vec[i];
    }
    return out;
}

void save_gc(const GCElement& z, const std::string& algebra_ref, std::ostream& os) {
    ordered_json j;
    j["algebra"] = algebra_ref;
    j["graphs"] = ordered_json::array();
    for (const auto& [g, c] : z.terms)
        j["graphs"].push_back({{"graph", graph_literal(g, Rational(1), z.algebra)}, {"coeff", rational_to_string(c)}});
    os << j.dump(2) << "\n";
}

GCElement load_gc(std::istream& is, const PDAlgebra& algebra) {
    ordered_json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("bad JSON: ") + e.what());
    }
    GCElement z;
    z.algebra = &algebra;
    try {
        for (const auto& item : j.at("graphs")) {
            auto [g, c] = parse_graph_literal(item.at("graph").get<std::string>(), &algebra);
            Rational extra = item.contains("coeff") ? parse_rational(item.at("coeff").get<std::string>()) : Rational(1);
            if (g.n_ext != 0) throw ParseError(0, "MC-element graphs must have no external vertices");
            add_term(z.terms, g, c * extra, algebra.degrees());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("bad MC-element file: ") + e.what());
    }
    return z;
}

} // namespace confgc
