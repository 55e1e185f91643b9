#include "confgc/operad.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "confgc/enumerate.hpp"
#include "confgc/errors.hpp"

namespace confgc {

GraphSum d_split(const DecoratedGraph& g, const PDAlgebra& algebra) {
    GraphSum out;
    const int D = g.ambient_dim;
    const DiagonalClass delta = diagonal(algebra);

    for (size_t t = 0; t < g.edges.size(); ++t) {
        // Leibniz prefix in the [vertices][edges][decorations] monomial order:
        // the differential crosses the n_int vertex generators (degree D) and
        // t earlier edges.
        int sign = neg_one_pow(static_cast<long>(D) * g.n_int + static_cast<long>(D - 1) * static_cast<long>(t));
        DecoratedGraph h = g;
        h.edges.erase(h.edges.begin() + static_cast<long>(t));
        const int u = g.edges[t].tail;
        const int v = g.edges[t].head;
        for (const auto& [alpha, beta, gval] : delta.terms) {
            DecoratedGraph term = h;
            std::vector<Decoration> fresh;
            if (alpha != algebra.unit()) fresh.push_back({u, alpha});
            if (beta != algebra.unit()) fresh.push_back({v, beta});
            term.decorations.insert(term.decorations.begin(), fresh.begin(), fresh.end());
            add_term(out, term, Rational(sign) * gval, algebra.degrees());
        }
    }
    return out;
}

GraphSum d_contr(const DecoratedGraph& g, const std::vector<int>& basis_degrees) {
    GraphSum out;
    const int D = g.ambient_dim;
    for (size_t t = 0; t < g.edges.size(); ++t) {
        const Edge e = g.edges[t];
        if (e.tail == e.head) continue; // tadpoles are not contracted
        if (!g.is_internal(e.tail) && !g.is_internal(e.head)) continue;
        int keep = e.tail, remove = e.head;
        if (!g.is_internal(remove)) std::swap(keep, remove); // remove the internal end
        if (g.is_internal(keep) && g.is_internal(remove) && keep > remove) std::swap(keep, remove);
        // The relative sign against d_split is fixed by Stokes: the boundary
        // term enters with the opposite sign, and the partition function is
        // only closed for that convention. The removed vertex generator sits
        // at position p in the vertex block, the edge crosses the remaining
        // k-1 vertices and t earlier edges.
        const long p = remove - g.n_ext;
        int sign = -neg_one_pow(static_cast<long>(D) * (p + 1) + static_cast<long>(D - 1) * static_cast<long>(t));

        DecoratedGraph h;
        h.n_ext = g.n_ext;
        h.n_int = g.n_int - 1;
        h.ambient_dim = D;
        auto relabel = [&](int v) {
            if (v == remove) v = keep;
            return v > remove ? v - 1 : v;
        };
        for (size_t s = 0; s < g.edges.size(); ++s) {
            if (s == t) continue;
            h.edges.push_back({relabel(g.edges[s].tail), relabel(g.edges[s].head)});
        }
        for (const Decoration& d : g.decorations) h.decorations.push_back({relabel(d.vertex), d.basis});
        add_term(out, h, Rational(sign), basis_degrees);
    }
    return out;
}

GraphSum d_gra(const DecoratedGraph& g, const PDAlgebra& algebra) {
    if (g.n_int != 0) throw FlavorViolation("d_gra expects a graph without internal vertices");
    return d_split(g, algebra);
}

void CocompositionShape::check(int n_ext) const {
    std::set<int> seen;
    for (const auto& block : blocks) {
        if (block.empty()) throw ShapeMismatch("empty block");
        for (int v : block) {
            if (v < 0 || v >= n_ext) throw ShapeMismatch("block label out of range");
            if (!seen.insert(v).second) throw ShapeMismatch("duplicate label in shape");
        }
    }
    if (static_cast<int>(seen.size()) != n_ext) throw ShapeMismatch("shape does not cover all labels");
}

CocompositionShape CocompositionShape::singletons(int n_ext) {
    CocompositionShape s;
    for (int i = 0; i < n_ext; ++i) s.blocks.push_back({i});
    return s;
}

std::vector<int> TensorTerm::key() const {
    std::vector<int> k = quotient.encoding();
    for (const DecoratedGraph& g : inserted) {
        k.push_back(-7);
        std::vector<int> e = g.encoding();
        k.insert(k.end(), e.begin(), e.end());
    }
    return k;
}

void add_tensor(TensorSum& sum, TensorTerm term, const Rational& coeff) {
    if (coeff == 0) return;
    std::vector<int> key = term.key();
    auto it = sum.find(key);
    if (it == sum.end()) {
        sum.emplace(std::move(key), std::make_pair(std::move(term), coeff));
    } else {
        it->second.second += coeff;
        if (it->second.second == 0) sum.erase(it);
    }
}

TensorSum deinsert(const DecoratedGraph& g, const CocompositionShape& shape,
                   const DeinsertionPolicy& policy, const std::vector<int>& basis_degrees) {
    shape.check(g.n_ext);
    const int k = shape.arity();
    const int D = g.ambient_dim;

    // block_of[v] for externals; -1 denotes the quotient.
    std::vector<int> block_of(static_cast<size_t>(g.n_vertices()), -1);
    std::vector<std::vector<int>> blocks_sorted = shape.blocks;
    for (auto& b : blocks_sorted) std::sort(b.begin(), b.end());
    std::vector<int> ext_slot(static_cast<size_t>(g.n_ext), -1); // position within its block
    for (int j = 0; j < k; ++j)
        for (size_t p = 0; p < blocks_sorted[static_cast<size_t>(j)].size(); ++p) {
            int v = blocks_sorted[static_cast<size_t>(j)][p];
            block_of[static_cast<size_t>(v)] = j;
            ext_slot[static_cast<size_t>(v)] = static_cast<int>(p);
        }

    // Decorated internal vertices must stay on the quotient factor.
    std::vector<bool> decorated(static_cast<size_t>(g.n_vertices()), false);
    for (const Decoration& d : g.decorations) decorated[static_cast<size_t>(d.vertex)] = true;

    std::vector<int> internal_ids;
    for (int v = g.n_ext; v < g.n_vertices(); ++v) internal_ids.push_back(v);

    TensorSum out;
    // assign[i] in {-1 (quotient), 0..k-1}; intra-block edges then pick a side.
    std::vector<int> assign(internal_ids.size(), -1);

    std::function<void(size_t)> assign_rec = [&](size_t idx) {
        if (idx < internal_ids.size()) {
            assign[idx] = -1;
            assign_rec(idx + 1);
            if (!decorated[static_cast<size_t>(internal_ids[idx])]) {
                for (int j = 0; j < k; ++j) {
                    assign[idx] = j;
                    assign_rec(idx + 1);
                }
                assign[idx] = -1;
            }
            return;
        }
        // Destination factor per vertex: -1 quotient, j inserted factor.
        auto factor_of = [&](int v) {
            if (v < g.n_ext) return block_of[static_cast<size_t>(v)];
            return assign[static_cast<size_t>(v - g.n_ext)];
        };
        // Edges with both endpoints mapping into the same inserted factor j
        // (after collapsing blocks) can stay in factor j or become a quotient
        // tadpole at j; every other edge is forced.
        std::vector<size_t> choice_edges;
        for (size_t t = 0; t < g.edges.size(); ++t) {
            const Edge& e = g.edges[t];
            int ft = factor_of(e.tail), fh = factor_of(e.head);
            if (ft >= 0 && ft == fh) choice_edges.push_back(t);
        }
        const size_t n_choices = choice_edges.size();
        for (size_t mask = 0; mask < (size_t{1} << n_choices); ++mask) {
            // bit set -> promote to quotient tadpole
            std::vector<bool> promote(g.edges.size(), false);
            bool legal = true;
            for (size_t c = 0; c < n_choices; ++c) {
                bool p = (mask >> c) & 1;
                promote[choice_edges[c]] = p;
                if (p && !policy.quotient_tadpoles) legal = false;
                if (!p) {
                    const Edge& e = g.edges[choice_edges[c]];
                    if (e.tail == e.head && !policy.inserted_tadpoles) legal = false;
                }
            }
            if (!legal) continue;

            // Destination block of each edge for the Koszul sign: inserted
            // factors 0..k-1 first, quotient last (the stated edge-label block
            // order).
            std::vector<int> edge_block(g.edges.size(), k);
            for (size_t t = 0; t < g.edges.size(); ++t) {
                const Edge& e = g.edges[t];
                int ft = factor_of(e.tail), fh = factor_of(e.head);
                if (ft >= 0 && ft == fh && !promote[t]) edge_block[t] = ft;
            }
            // Koszul sign of the stable partition of the full generator list
            // ([vertices][edges][decorations]) into the factor blocks
            // [ins_1]..[ins_k][quotient].
            std::vector<std::pair<int, int>> gens; // (block, degree)
            for (size_t i = 0; i < internal_ids.size(); ++i)
                gens.push_back({assign[i] < 0 ? k : assign[i], D});
            for (size_t t = 0; t < g.edges.size(); ++t) gens.push_back({edge_block[t], D - 1});
            for (const Decoration& dd : g.decorations) {
                (void)dd;
                gens.push_back({k, dd.basis >= 0 ? basis_degrees.at(static_cast<size_t>(dd.basis)) : 0});
            }
            int sign = 1;
            for (size_t a = 0; a + 1 < gens.size(); ++a)
                for (size_t b = a + 1; b < gens.size(); ++b)
                    if (gens[b].first < gens[a].first && (gens[a].second % 2) && (gens[b].second % 2))
                        sign = -sign;

            // Build the factors.
            TensorTerm term;
            term.inserted.assign(static_cast<size_t>(k), DecoratedGraph{});
            // vertex numbering per factor
            std::vector<int> new_id(static_cast<size_t>(g.n_vertices()), -1);
            std::vector<int> n_int_of(static_cast<size_t>(k + 1), 0);
            for (int j = 0; j < k; ++j) {
                term.inserted[static_cast<size_t>(j)].n_ext =
                    static_cast<int>(blocks_sorted[static_cast<size_t>(j)].size());
                term.inserted[static_cast<size_t>(j)].ambient_dim = D;
            }
            term.quotient.n_ext = k;
            term.quotient.ambient_dim = D;
            for (int v = 0; v < g.n_ext; ++v) new_id[static_cast<size_t>(v)] = ext_slot[static_cast<size_t>(v)];
            for (size_t i = 0; i < internal_ids.size(); ++i) {
                int v = internal_ids[i];
                int f = assign[i];
                if (f < 0)
                    new_id[static_cast<size_t>(v)] = k + n_int_of[static_cast<size_t>(k)]++;
                else
                    new_id[static_cast<size_t>(v)] =
                        term.inserted[static_cast<size_t>(f)].n_ext + n_int_of[static_cast<size_t>(f)]++;
            }
            for (int j = 0; j < k; ++j) term.inserted[static_cast<size_t>(j)].n_int = n_int_of[static_cast<size_t>(j)];
            term.quotient.n_int = n_int_of[static_cast<size_t>(k)];

            // Edges in original order within each destination block.
            for (int dest = 0; dest <= k; ++dest) {
                for (size_t t = 0; t < g.edges.size(); ++t) {
                    if (edge_block[t] != (dest == k ? k : dest)) continue;
                    const Edge& e = g.edges[t];
                    if (dest == k) {
                        auto qv = [&](int v) {
                            int f = factor_of(v);
                            return f >= 0 ? f : new_id[static_cast<size_t>(v)];
                        };
                        if (promote[t]) {
                            int j = factor_of(e.tail);
                            term.quotient.edges.push_back({j, j});
                        } else {
                            term.quotient.edges.push_back({qv(e.tail), qv(e.head)});
                        }
                    } else {
                        term.inserted[static_cast<size_t>(dest)].edges.push_back(
                            {new_id[static_cast<size_t>(e.tail)], new_id[static_cast<size_t>(e.head)]});
                    }
                }
            }
            // All decorations live on the quotient factor.
            for (const Decoration& d : g.decorations) {
                int f = factor_of(d.vertex);
                int v = f >= 0 ? f : new_id[static_cast<size_t>(d.vertex)];
                term.quotient.decorations.push_back({v, d.basis});
            }

            // Canonicalize every factor, folding signs.
            Rational coeff(sign);
            CanonResult cq = canonicalize(term.quotient, basis_degrees);
            if (cq.zero) continue;
            coeff *= cq.sign;
            term.quotient = cq.graph;
            bool dead = false;
            for (DecoratedGraph& f : term.inserted) {
                CanonResult cf = canonicalize(f, basis_degrees);
                if (cf.zero) {
                    dead = true;
                    break;
                }
                coeff *= cf.sign;
                f = cf.graph;
            }
            if (dead) continue;
            add_tensor(out, std::move(term), coeff);
        }
    };
    assign_rec(0);
    return out;
}

TensorSum cocompose(const DecoratedGraph& g, const CocompositionShape& shape) {
    if (!g.decorations.empty()) throw FlavorViolation("cocompose expects an undecorated graph");
    return deinsert(g, shape, DeinsertionPolicy{true, true}, {});
}

TensorSum coact(const DecoratedGraph& g, const CocompositionShape& shape,
                const std::vector<int>& basis_degrees) {
    return deinsert(g, shape, DeinsertionPolicy{true, false}, basis_degrees);
}

int tensor_reorder_sign(const std::vector<int>& degrees, const std::vector<int>& perm) {
    int sign = 1;
    for (size_t a = 0; a + 1 < perm.size(); ++a)
        for (size_t b = a + 1; b < perm.size(); ++b)
            if (perm[a] > perm[b] && degrees[static_cast<size_t>(perm[a])] % 2 &&
                degrees[static_cast<size_t>(perm[b])] % 2)
                sign = -sign;
    return sign;
}

namespace {

// Set partitions of {0..n-1} with blocks ordered by smallest member.
std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<std::vector<int>> current;
    std::function<void(int)> rec = [&](int v) {
        if (v == n) {
            out.push_back(current);
            return;
        }
        const size_t existing = current.size();
        for (size_t i = 0; i < existing; ++i) {
            current[i].push_back(v);
            rec(v + 1);
            current[i].pop_back();
        }
        current.push_back({v});
        rec(v + 1);
        current.pop_back();
    };
    rec(0);
    return out;
}

std::vector<DecoratedGraph> gra_level_graphs(int n_ext, int D, int max_edges, bool with_tadpoles,
                                             const PDAlgebra* algebra, int max_decorations) {
    std::vector<DecoratedGraph> out;
    EnumConstraints cons;
    cons.forbid_internal_only_components = false;
    cons.ext_tadpole_ok.assign(static_cast<size_t>(n_ext), with_tadpoles);
    int max_dec_degree = 0;
    if (algebra)
        for (int b = 0; b < algebra->n_basis(); ++b) max_dec_degree = std::max(max_dec_degree, algebra->basis_degree(b));
    const int deg_hi = (D - 1) * max_edges + max_decorations * max_dec_degree;
    for (int deg = 0; deg <= deg_hi; ++deg)
        for (const DecoratedGraph& g : enumerate_graphs(n_ext, D, cons, 0, deg, algebra)) {
            if (static_cast<int>(g.edges.size()) > max_edges) continue;
            if (static_cast<int>(g.decorations.size()) > max_decorations) continue;
            out.push_back(g);
        }
    return out;
}

} // namespace

bool check_coassociativity(int n_ext, int D, int max_edges, bool with_tadpoles, std::string* witness) {
    const std::vector<int> no_degrees;
    auto partitions_n = set_partitions(n_ext);
    std::vector<DecoratedGraph> graphs = gra_level_graphs(n_ext, D, max_edges, with_tadpoles, nullptr, 0);
    for (const DecoratedGraph& g : graphs) {
        for (const auto& s_blocks : partitions_n) {
            CocompositionShape S{s_blocks};
            const int kk = S.arity();
            for (const auto& t_blocks : set_partitions(kk)) {
                CocompositionShape T{t_blocks};
                const int m = T.arity();
                // Reference tuples: (g''; middles in T order; inners in global
                // S order), coefficients compared exactly.
                std::map<std::vector<int>, Rational> lhs, rhs;

                // Side A: Delta_S then Delta_T on the quotient.
                for (const auto& [keyA, tcA] : cocompose(g, S)) {
                    const TensorTerm& a = tcA.first;
                    for (const auto& [keyB, tcB] : cocompose(a.quotient, T)) {
                        const TensorTerm& b = tcB.first;
                        std::vector<int> key = b.quotient.encoding();
                        for (const DecoratedGraph& h : b.inserted) {
                            key.push_back(-7);
                            auto e = h.encoding();
                            key.insert(key.end(), e.begin(), e.end());
                        }
                        for (const DecoratedGraph& h : a.inserted) {
                            key.push_back(-7);
                            auto e = h.encoding();
                            key.insert(key.end(), e.begin(), e.end());
                        }
                        Rational& slot = lhs[key];
                        slot += tcA.second * tcB.second;
                        if (slot == 0) lhs.erase(key);
                    }
                }

                // Side B: Delta_U with the superblocks, then Delta_{V_j} on
                // each inserted factor.
                CocompositionShape U;
                std::vector<std::vector<int>> inner_blocks_of(static_cast<size_t>(m)); // global S indices per T block
                for (int j = 0; j < m; ++j) {
                    std::vector<int> super;
                    std::vector<int> members = T.blocks[static_cast<size_t>(j)];
                    std::sort(members.begin(), members.end());
                    inner_blocks_of[static_cast<size_t>(j)] = members;
                    for (int b : members)
                        super.insert(super.end(), S.blocks[static_cast<size_t>(b)].begin(),
                                     S.blocks[static_cast<size_t>(b)].end());
                    U.blocks.push_back(std::move(super));
                }
                for (const auto& [keyU, tcU] : cocompose(g, U)) {
                    const TensorTerm& u = tcU.first;
                    // Expand each inserted factor by its induced shape.
                    struct Expanded {
                        DecoratedGraph middle;
                        std::vector<DecoratedGraph> inners;
                        Rational coeff;
                    };
                    std::vector<std::vector<Expanded>> options(static_cast<size_t>(m));
                    for (int j = 0; j < m; ++j) {
                        std::vector<int> super_sorted = U.blocks[static_cast<size_t>(j)];
                        std::sort(super_sorted.begin(), super_sorted.end());
                        CocompositionShape Vj;
                        for (int b : inner_blocks_of[static_cast<size_t>(j)]) {
                            std::vector<int> blk;
                            for (int v : S.blocks[static_cast<size_t>(b)]) {
                                auto it = std::lower_bound(super_sorted.begin(), super_sorted.end(), v);
                                blk.push_back(static_cast<int>(it - super_sorted.begin()));
                            }
                            Vj.blocks.push_back(std::move(blk));
                        }
                        for (const auto& [keyV, tcV] : cocompose(u.inserted[static_cast<size_t>(j)], Vj))
                            options[static_cast<size_t>(j)].push_back(
                                {tcV.first.quotient, tcV.first.inserted, tcV.second});
                    }
                    // Cartesian product over j with the tensor reorder sign.
                    bool any_empty = false;
                    for (int j = 0; j < m; ++j)
                        if (options[static_cast<size_t>(j)].empty()) any_empty = true;
                    if (any_empty) continue;
                    std::vector<size_t> pick(static_cast<size_t>(m), 0);
                    while (true) {
                        Rational coeff = tcU.second;
                        // natural order: [inner_1..(block of j=1), q_1, inner_2.., q_2, .., Q]
                        // reference:     [inners in global S order, q_1..q_m, Q]
                        std::vector<int> degrees;
                        std::vector<std::pair<int, int>> source_tag; // (class, index) for permutation
                        std::vector<const DecoratedGraph*> factors;
                        for (int j = 0; j < m; ++j) {
                            const Expanded& ex = options[static_cast<size_t>(j)][pick[static_cast<size_t>(j)]];
                            coeff *= ex.coeff;
                            for (size_t r = 0; r < ex.inners.size(); ++r) {
                                factors.push_back(&ex.inners[r]);
                                source_tag.push_back({0, inner_blocks_of[static_cast<size_t>(j)][r]});
                            }
                            factors.push_back(&ex.middle);
                            source_tag.push_back({1, j});
                        }
                        for (const DecoratedGraph* f : factors) degrees.push_back(star_degree(*f, no_degrees));
                        // target: class 0 sorted by S index, then class 1 by j
                        std::vector<int> order(factors.size());
                        std::iota(order.begin(), order.end(), 0);
                        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                            return source_tag[static_cast<size_t>(a)] < source_tag[static_cast<size_t>(b)];
                        });
                        coeff *= tensor_reorder_sign(degrees, order);

                        std::vector<int> key = u.quotient.encoding();
                        // middles in T order
                        std::vector<const DecoratedGraph*> middles(static_cast<size_t>(m));
                        std::map<int, const DecoratedGraph*> inners_by_block;
                        for (size_t i = 0; i < factors.size(); ++i) {
                            if (source_tag[i].first == 1)
                                middles[static_cast<size_t>(source_tag[i].second)] = factors[i];
                            else
                                inners_by_block[source_tag[i].second] = factors[i];
                        }
                        for (int j = 0; j < m; ++j) {
                            key.push_back(-7);
                            auto e = middles[static_cast<size_t>(j)]->encoding();
                            key.insert(key.end(), e.begin(), e.end());
                        }
                        for (int b = 0; b < kk; ++b) {
                            key.push_back(-7);
                            auto e = inners_by_block.at(b)->encoding();
                            key.insert(key.end(), e.begin(), e.end());
                        }
                        Rational& slot = rhs[key];
                        slot += coeff;
                        if (slot == 0) rhs.erase(key);

                        // advance
                        int j = 0;
                        while (j < m) {
                            if (++pick[static_cast<size_t>(j)] < options[static_cast<size_t>(j)].size()) break;
                            pick[static_cast<size_t>(j)] = 0;
                            ++j;
                        }
                        if (j == m) break;
                    }
                }

                if (!(lhs == rhs)) {
                    if (witness) {
                        *witness = "coassociativity fails for " + graph_literal(g, Rational(1), nullptr) +
                                   " with " + std::to_string(kk) + " -> " + std::to_string(m) + " blocks";
                    }
                    return false;
                }
            }
        }
    }
    return true;
}

bool check_gra_comodule_compat(const PDAlgebra& algebra, int n_ext, int max_edges, int max_decorations,
                               std::string* witness) {
    const std::vector<int>& degrees = algebra.degrees();
    std::vector<DecoratedGraph> graphs =
        gra_level_graphs(n_ext, algebra.dimension(), max_edges, true, &algebra, max_decorations);
    for (const DecoratedGraph& g : graphs) {
        for (const auto& s_blocks : set_partitions(n_ext)) {
            CocompositionShape S{s_blocks};
            std::map<std::vector<int>, Rational> lhs, rhs;
            for (const auto& [h, c] : d_gra(g, algebra))
                for (const auto& [key, tc] : coact(h, S, degrees)) {
                    Rational& slot = lhs[key];
                    slot += c * tc.second;
                    if (slot == 0) lhs.erase(key);
                }
            for (const auto& [key, tc] : coact(g, S, degrees)) {
                const TensorTerm& term = tc.first;
                // Monomial order is [inserted factors][quotient]; the inserted
                // ^*Gra_D factors have zero differential.
                long prefix = 0;
                for (const DecoratedGraph& f : term.inserted) prefix += star_degree(f, degrees);
                int sign = neg_one_pow(prefix);
                for (const auto& [dq, c] : d_gra(term.quotient, algebra)) {
                    TensorTerm t2{dq, term.inserted};
                    std::vector<int> key2 = t2.key();
                    Rational& slot = rhs[key2];
                    slot += tc.second * c * sign;
                    if (slot == 0) rhs.erase(key2);
                }
            }
            if (!(lhs == rhs)) {
                if (witness)
                    *witness = "comodule square fails for " + graph_literal(g, Rational(1), &algebra);
                return false;
            }
        }
    }
    return true;
}

} // namespace confgc
