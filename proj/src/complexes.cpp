#include "confgc/complexes.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

#include "confgc/errors.hpp"

namespace confgc {

std::string flavor_name(FlavorKind kind) {
    switch (kind) {
        case FlavorKind::GraphsD: return "graphsD";
        case FlavorKind::GraphsM: return "graphsM";
        case FlavorKind::GraphsM_NoTadpole: return "graphsM-notadpole";
        case FlavorKind::GraphsM_Reduced: return "graphsM-reduced";
        case FlavorKind::GraphsM_Forest: return "graphsM-forest";
        case FlavorKind::BV: return "bv";
    }
    return "?";
}

std::optional<FlavorKind> flavor_from_name(const std::string& name) {
    for (FlavorKind k : {FlavorKind::GraphsD, FlavorKind::GraphsM, FlavorKind::GraphsM_NoTadpole,
                         FlavorKind::GraphsM_Reduced, FlavorKind::GraphsM_Forest, FlavorKind::BV})
        if (flavor_name(k) == name) return k;
    return std::nullopt;
}

std::vector<int> ComplexFlavor::basis_degrees() const {
    return algebra ? algebra->degrees() : std::vector<int>{};
}

EnumConstraints ComplexFlavor::constraints(int n_ext) const {
    EnumConstraints c;
    c.forbid_internal_only_components = true;
    // Tadpole generators require a trivialized sphere bundle; the obstruction
    // shows up combinatorially as the residual chi(A) at the one-vertex
    // tadpole graph, so they are only admitted when chi vanishes.
    const bool tadpoles_ok = algebra && algebra->euler_characteristic() == 0;
    switch (kind) {
        case FlavorKind::GraphsD:
            c.min_internal_valence = 3;
            break;
        case FlavorKind::GraphsM:
            c.ext_tadpole_ok.assign(static_cast<size_t>(n_ext), tadpoles_ok);
            c.int_tadpole_ok = tadpoles_ok;
            break;
        case FlavorKind::GraphsM_NoTadpole:
            break;
        case FlavorKind::GraphsM_Reduced:
            c.ext_tadpole_ok.assign(static_cast<size_t>(n_ext), tadpoles_ok);
            c.int_tadpole_ok = tadpoles_ok;
            c.min_internal_valence = 3;
            break;
        case FlavorKind::GraphsM_Forest:
            c.min_internal_valence = 3;
            c.genus_cap = 0;
            break;
        case FlavorKind::BV:
            c.ext_tadpole_ok.assign(static_cast<size_t>(n_ext), false);
            for (int i = 0; i < std::min(n_ext, bv_framed_count); ++i) c.ext_tadpole_ok[static_cast<size_t>(i)] = true;
            c.int_tadpole_ok = false;
            break;
    }
    return c;
}

bool ComplexFlavor::admits_basis_graph(const DecoratedGraph& g) const {
    // Internal-only components are never part of a basis graph.
    int n_comp = 0;
    std::vector<int> comp = connected_components(g, &n_comp);
    std::vector<bool> has_ext(static_cast<size_t>(n_comp), false);
    for (int v = 0; v < g.n_ext; ++v) has_ext[static_cast<size_t>(comp[static_cast<size_t>(v)])] = true;
    for (int v = g.n_ext; v < g.n_vertices(); ++v)
        if (!has_ext[static_cast<size_t>(comp[static_cast<size_t>(v)])]) return false;

    std::vector<int> val = vertex_valences(g);
    auto internal_valence_at_least = [&](int bound) {
        for (int v = g.n_ext; v < g.n_vertices(); ++v)
            if (val[static_cast<size_t>(v)] < bound) return false;
        return true;
    };
    auto tadpole_at = [&](int v) {
        for (const Edge& e : g.edges)
            if (e.tail == v && e.head == v) return true;
        return false;
    };
    switch (kind) {
        case FlavorKind::GraphsD: {
            if (!g.decorations.empty()) return false;
            for (const Edge& e : g.edges)
                if (e.tail == e.head) return false;
            // internal valence counts edges only (there are no decorations)
            return internal_valence_at_least(3);
        }
        case FlavorKind::GraphsM: {
            if (algebra && algebra->euler_characteristic() != 0)
                for (const Edge& e : g.edges)
                    if (e.tail == e.head) return false;
            return true;
        }
        case FlavorKind::GraphsM_NoTadpole: {
            for (const Edge& e : g.edges)
                if (e.tail == e.head) return false;
            return true;
        }
        case FlavorKind::GraphsM_Reduced: {
            if (algebra && algebra->euler_characteristic() != 0)
                for (const Edge& e : g.edges)
                    if (e.tail == e.head) return false;
            return internal_valence_at_least(3);
        }
        case FlavorKind::GraphsM_Forest:
            return internal_valence_at_least(3) && loop_order(g) == 0;
        case FlavorKind::BV: {
            for (int v = std::min(g.n_ext, bv_framed_count); v < g.n_vertices(); ++v)
                if (tadpole_at(v)) return false;
            return true;
        }
    }
    return false;
}

const GCElement& ComplexFlavor::effective_mc() const { return mc_effective_; }

void ComplexFlavor::init() {
    if (kind == FlavorKind::GraphsD) {
        if (algebra) throw FlavorViolation("GraphsD carries no algebra");
        return;
    }
    if (!algebra) throw FlavorViolation(flavor_name(kind) + " requires an algebra");
    if (D != algebra->dimension()) throw FlavorViolation("flavor dimension differs from the algebra dimension");
    if (kind == FlavorKind::BV && D != 2) throw FlavorViolation("BV flavors require D = 2");
    if (kind == FlavorKind::GraphsM_Reduced || kind == FlavorKind::GraphsM_Forest) {
        // The reduced quotient is only a complex when the twist is >=3-valent;
        // use that part of the supplied MC element.
        mc_effective_ = filter_valence(mc, ValenceMode::GE3).kept;
    } else {
        mc_effective_ = mc;
    }
    mc_effective_.algebra = algebra;
}

ComplexFlavor make_flavor(FlavorKind kind, const PDAlgebra* algebra, const GCElement* mc, int D,
                          int bv_framed_count) {
    ComplexFlavor f;
    f.kind = kind;
    f.algebra = algebra;
    f.D = D;
    f.bv_framed_count = bv_framed_count;
    if (mc) f.mc = *mc;
    if (algebra && f.mc.algebra == nullptr) f.mc.algebra = algebra;
    f.init();
    return f;
}

GraphSum d_graphs(const DecoratedGraph& g, const ComplexFlavor& flavor) {
    const std::vector<int> degrees = flavor.basis_degrees();
    if (!flavor.admits_basis_graph(g)) throw FlavorViolation("graph is not a basis graph of " + flavor_name(flavor.kind));
    GraphSum raw;
    if (flavor.uses_algebra()) add_sum(raw, d_split(g, *flavor.algebra));
    add_sum(raw, d_contr(g, degrees));
    if (flavor.kind == FlavorKind::GraphsD) return raw;

    // Partition-function cut: internal-only components created by d_split are
    // evaluated through the MC element. Terms outside the flavor span are
    // projected away for the quotient flavors and are a convention bug for the
    // others (those flavors are honestly closed under d).
    const bool quotient_flavor =
        flavor.kind == FlavorKind::GraphsM_Reduced || flavor.kind == FlavorKind::GraphsM_Forest;
    GraphSum out;
    const GCElement& z = flavor.effective_mc();
    for (const auto& [t, c] : raw) {
        CutResult cut = cut_internal_components(t, degrees);
        Rational value = c * cut.sign;
        bool dead = false;
        for (const DecoratedGraph& compg : cut.cut) {
            CanonResult cc = canonicalize(compg, degrees);
            if (cc.zero) {
                dead = true;
                break;
            }
            auto it = z.terms.find(cc.graph);
            if (it == z.terms.end()) {
                dead = true;
                break;
            }
            value *= it->second * cc.sign;
        }
        if (dead || value == 0) continue;
        DecoratedGraph result;
        if (cut.cut.empty()) {
            result = t;
        } else {
            CanonResult cr = canonicalize(cut.rest, degrees);
            if (cr.zero) continue;
            value *= cr.sign;
            result = cr.graph;
        }
        if (!flavor.admits_basis_graph(result)) {
            if (quotient_flavor) continue;
            throw InternalError("differential left the " + flavor_name(flavor.kind) + " span");
        }
        Rational& slot = out[result];
        slot += value;
        if (slot == 0) out.erase(result);
    }
    return out;
}

long GradedComplex::dim(int degree, int k_cap) const {
    auto it = basis.find(degree);
    if (it == basis.end()) return 0;
    if (k_cap < 0) return static_cast<long>(it->second.size());
    long n = 0;
    for (const DecoratedGraph& g : it->second)
        if (g.n_int <= k_cap) ++n;
    return n;
}

std::vector<long> GradedComplex::columns_with_k_at_most(int degree, int k_cap) const {
    std::vector<long> ids;
    auto it = basis.find(degree);
    if (it == basis.end()) return ids;
    for (long i = 0; i < static_cast<long>(it->second.size()); ++i)
        if (it->second[static_cast<size_t>(i)].n_int <= k_cap) ids.push_back(i);
    return ids;
}

namespace {

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    int count = std::min(workers, n);
    for (int w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace

GradedComplex build_complex(const ComplexFlavor& flavor, int n_ext, int deg_min, int deg_max, int k_max,
                            int workers, int top_k_cap) {
    if (k_max < 0) throw ConfigError("k_max must be >= 0");
    GradedComplex cx;
    cx.flavor = flavor;
    cx.n_ext = n_ext;
    cx.k_max = k_max;
    cx.deg_lo = deg_min - 1;
    cx.deg_hi = deg_max + 1;
    const std::vector<int> degrees = flavor.basis_degrees();
    const EnumConstraints cons = flavor.constraints(n_ext);
    const int top_cap = top_k_cap >= 0 ? std::min(top_k_cap, k_max) : k_max;

    // Shard the enumeration by (degree, k).
    std::vector<std::pair<int, int>> shards;
    for (int deg = cx.deg_lo; deg <= cx.deg_hi; ++deg)
        for (int k = 0; k <= (deg == cx.deg_hi ? top_cap : k_max); ++k) shards.push_back({deg, k});
    std::vector<std::vector<DecoratedGraph>> found(shards.size());
    parallel_for(static_cast<int>(shards.size()), workers, [&](int i) {
        auto [deg, k] = shards[static_cast<size_t>(i)];
        found[static_cast<size_t>(i)] =
            enumerate_graphs(n_ext, flavor.D, cons, k, deg, flavor.uses_algebra() ? flavor.algebra : nullptr);
    });
    for (size_t i = 0; i < shards.size(); ++i) {
        auto& dst = cx.basis[shards[i].first];
        dst.insert(dst.end(), found[i].begin(), found[i].end());
    }
    for (auto& [deg, graphs] : cx.basis) {
        std::vector<std::pair<std::vector<int>, size_t>> keyed;
        keyed.reserve(graphs.size());
        for (size_t i = 0; i < graphs.size(); ++i) keyed.push_back({graphs[i].encoding(), i});
        std::sort(keyed.begin(), keyed.end());
        std::vector<DecoratedGraph> sorted;
        sorted.reserve(graphs.size());
        for (auto& [enc, i] : keyed) sorted.push_back(std::move(graphs[i]));
        graphs = std::move(sorted);
    }

    // Assemble differentials d : C^deg -> C^{deg+1} for deg_lo .. deg_hi - 1.
    std::vector<int> diff_degs;
    for (int deg = cx.deg_lo; deg < cx.deg_hi; ++deg) diff_degs.push_back(deg);
    // cached target encodings for the image lookups
    std::map<int, std::vector<std::vector<int>>> enc_cache;
    for (int deg = cx.deg_lo; deg <= cx.deg_hi; ++deg) {
        auto& encs = enc_cache[deg];
        const auto& graphs = cx.basis[deg];
        encs.reserve(graphs.size());
        for (const DecoratedGraph& g : graphs) encs.push_back(g.encoding());
    }
    std::vector<SparseRationalMatrix> mats(diff_degs.size());
    parallel_for(static_cast<int>(diff_degs.size()), workers, [&](int i) {
        int deg = diff_degs[static_cast<size_t>(i)];
        const auto& src = cx.basis[deg];
        const auto& encs = enc_cache[deg + 1];
        std::vector<Triplet> entries;
        // When the top layer is capped, only the columns whose image stays in
        // the capped row space are assembled (the rest are never read).
        const bool capped_target = (deg + 1 == cx.deg_hi) && top_cap < k_max;
        for (long col = 0; col < static_cast<long>(src.size()); ++col) {
            if (capped_target && src[static_cast<size_t>(col)].n_int > top_cap) continue;
            GraphSum image = d_graphs(src[static_cast<size_t>(col)], flavor);
            for (const auto& [h, c] : image) {
                std::vector<int> key = h.encoding();
                auto it = std::lower_bound(encs.begin(), encs.end(), key);
                if (it == encs.end() || *it != key)
                    throw InternalError("differential image misses the enumerated basis at degree " +
                                        std::to_string(deg + 1));
                entries.push_back({static_cast<long>(it - encs.begin()), col, c});
            }
        }
        mats[static_cast<size_t>(i)] = SparseRationalMatrix::from_triplets(
            static_cast<long>(encs.size()), static_cast<long>(src.size()), std::move(entries));
    });
    for (size_t i = 0; i < diff_degs.size(); ++i) cx.diff[diff_degs[static_cast<size_t>(i)]] = std::move(mats[i]);

    for (int deg = cx.deg_lo; deg + 1 < cx.deg_hi; ++deg) {
        SparseRationalMatrix first = cx.diff[deg];
        if (deg + 2 == cx.deg_hi && top_cap < k_max) {
            // the top differential only covers the capped columns; compose on
            // the columns whose double image stays inside them
            std::vector<long> rows(static_cast<size_t>(first.rows()));
            for (long i = 0; i < first.rows(); ++i) rows[static_cast<size_t>(i)] = i;
            first = first.select(rows, cx.columns_with_k_at_most(deg, top_cap));
        }
        if (!cx.diff[deg + 1].multiply(first).is_zero()) throw CompositionNotZero(deg);
    }
    return cx;
}

namespace {

std::vector<std::vector<Rational>> padded_kernel(const GradedComplex& cx, int deg, int k_lo) {
    const SparseRationalMatrix& dfull = cx.diff.at(deg);
    std::vector<long> all_rows(static_cast<size_t>(dfull.rows()));
    for (long i = 0; i < dfull.rows(); ++i) all_rows[static_cast<size_t>(i)] = i;
    std::vector<long> cols = cx.columns_with_k_at_most(deg, k_lo);
    SparseRationalMatrix dlow = dfull.select(all_rows, cols);
    std::vector<std::vector<Rational>> kern = kernel_basis(dlow);
    long dim_full = cx.dim(deg);
    std::vector<std::vector<Rational>> padded;
    for (const auto& v : kern) {
        std::vector<Rational> w(static_cast<size_t>(dim_full), Rational(0));
        for (size_t i = 0; i < cols.size(); ++i) w[static_cast<size_t>(cols[i])] = v[i];
        padded.push_back(std::move(w));
    }
    return padded;
}

long plain_rank(const GradedComplex& cx, int deg, int k_cap) {
    const SparseRationalMatrix& d = cx.diff.at(deg);
    std::vector<long> all_rows(static_cast<size_t>(d.rows()));
    for (long i = 0; i < d.rows(); ++i) all_rows[static_cast<size_t>(i)] = i;
    return rank(d.select(all_rows, cx.columns_with_k_at_most(deg, k_cap)));
}

} // namespace

BettiTable betti_of_built(const GradedComplex& probe, int deg_min, int deg_max, int k_max) {
    const int k_probe = probe.k_max;
    if (k_probe <= k_max) throw ConfigError("k_probe must exceed k_max");
    BettiTable table;
    table.deg_min = deg_min;
    table.deg_max = deg_max;
    // One forward elimination of each differential (full probe truncation) is
    // shared by the image tests of the degree above and the plain-probe Betti
    // numbers; kernel vectors are then reduced incrementally.
    std::map<int, ImageReducer> reducers;
    auto reducer_at = [&](int deg) -> ImageReducer& {
        auto it = reducers.find(deg);
        if (it == reducers.end()) it = reducers.emplace(deg, ImageReducer(probe.diff.at(deg))).first;
        return it->second;
    };
    for (int deg = deg_min; deg <= deg_max; ++deg) {
        std::vector<std::vector<Rational>> kern_kmax = padded_kernel(probe, deg, k_max);
        std::vector<std::vector<Rational>> kern_lower =
            k_max > 0 ? padded_kernel(probe, deg, k_max - 1) : kern_kmax;
        ImageReducer& red = reducer_at(deg - 1);
        long b = red.residual_rank(kern_kmax);
        long b_lower_kmax = k_max > 0 ? red.residual_rank(kern_lower) : b;
        long b_lower_kprobe = b;
        if (k_probe - 1 > k_max) {
            const SparseRationalMatrix& d1full = probe.diff.at(deg - 1);
            std::vector<long> all_rows(static_cast<size_t>(d1full.rows()));
            for (long i = 0; i < d1full.rows(); ++i) all_rows[static_cast<size_t>(i)] = i;
            ImageReducer red1(d1full.select(all_rows, probe.columns_with_k_at_most(deg - 1, k_probe - 1)));
            b_lower_kprobe = red1.residual_rank(kern_kmax);
        }
        bool stable = (b == b_lower_kmax) && (b == b_lower_kprobe);
        table.dims.push_back(probe.dim(deg, k_max));
        table.dims_probe.push_back(probe.dim(deg));
        table.betti.push_back(b);
        table.stabilized.push_back(stable);
        // plain truncation Betti numbers as metadata; the probe-level plain
        // value reuses ranks from the shared reducers when they exist
        long rank_d_kmax = probe.dim(deg, k_max) - static_cast<long>(kern_kmax.size());
        long rank_d1_kmax = plain_rank(probe, deg - 1, k_max);
        table.betti_plain_kmax.push_back(probe.dim(deg, k_max) - rank_d_kmax - rank_d1_kmax);
        if (deg < deg_max) {
            long rank_d_probe = reducer_at(deg).rank();
            long rank_d1_probe = red.rank();
            table.betti_plain_kprobe.push_back(probe.dim(deg) - rank_d_probe - rank_d1_probe);
        } else {
            table.betti_plain_kprobe.push_back(table.betti_plain_kmax.back());
        }
        bool saturated = true;
        for (int d2 = deg - 1; d2 <= deg + 1; ++d2)
            if (probe.dim(d2, k_max) != probe.dim(d2)) saturated = false;
        table.basis_saturated.push_back(saturated);
        reducers.erase(deg - 2); // no longer needed
    }
    return table;
}

BettiTable betti(const ComplexFlavor& flavor, int n_ext, int deg_min, int deg_max, int k_max, int k_probe,
                 int workers) {
    if (k_probe <= k_max) throw ConfigError("k_probe must exceed k_max");
    GradedComplex probe = build_complex(flavor, n_ext, deg_min, deg_max, k_probe, workers, k_max);
    return betti_of_built(probe, deg_min, deg_max, k_max);
}

namespace {

std::vector<DecoratedGraph> sample_basis_graphs(const ComplexFlavor& flavor, int n_ext, int max_internal,
                                                int max_edges, int max_decorations) {
    std::vector<DecoratedGraph> out;
    const EnumConstraints cons = flavor.constraints(n_ext);
    const int D = flavor.D;
    int max_dec_degree = 0;
    if (flavor.algebra)
        for (int b = 0; b < flavor.algebra->n_basis(); ++b)
            max_dec_degree = std::max(max_dec_degree, flavor.algebra->basis_degree(b));
    for (int k = 0; k <= max_internal; ++k)
        for (int deg = -D * max_internal; deg <= (D - 1) * max_edges + max_decorations * max_dec_degree; ++deg)
            for (const DecoratedGraph& g :
                 enumerate_graphs(n_ext, D, cons, k, deg, flavor.uses_algebra() ? flavor.algebra : nullptr)) {
                if (static_cast<int>(g.edges.size()) > max_edges) continue;
                if (static_cast<int>(g.decorations.size()) > max_decorations) continue;
                out.push_back(g);
            }
    return out;
}

std::vector<std::vector<std::vector<int>>> all_partitions(int n) {
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

} // namespace

bool check_graphs_comodule_compat(const ComplexFlavor& flavor, int n_ext, int max_internal, int max_edges,
                                  std::string* witness) {
    const std::vector<int> degrees = flavor.basis_degrees();
    ComplexFlavor dflavor;
    dflavor.kind = FlavorKind::GraphsD;
    dflavor.D = flavor.D;
    dflavor.init();
    for (const DecoratedGraph& g : sample_basis_graphs(flavor, n_ext, max_internal, max_edges, 2)) {
        for (const auto& blocks : all_partitions(n_ext)) {
            CocompositionShape S{blocks};
            std::map<std::vector<int>, Rational> lhs, rhs;
            for (const auto& [h, c] : d_graphs(g, flavor))
                for (const auto& [key, tc] : coact_graphs(h, flavor, S)) {
                    Rational& slot = lhs[key];
                    slot += c * tc.second;
                    if (slot == 0) lhs.erase(key);
                }
            for (const auto& [key, tc] : coact_graphs(g, flavor, S)) {
                const TensorTerm& term = tc.first;
                // monomial order [inserted factors][quotient]
                std::vector<long> prefix;
                long acc = 0;
                for (const DecoratedGraph& f : term.inserted) {
                    prefix.push_back(acc);
                    acc += star_degree(f, degrees);
                }
                for (size_t i = 0; i < term.inserted.size(); ++i) {
                    int sign = neg_one_pow(prefix[i]);
                    for (const auto& [df, c] : d_graphs(term.inserted[i], dflavor)) {
                        TensorTerm t2 = term;
                        t2.inserted[i] = df;
                        std::vector<int> key2 = t2.key();
                        Rational& slot = rhs[key2];
                        slot += tc.second * c * sign;
                        if (slot == 0) rhs.erase(key2);
                    }
                }
                int sign = neg_one_pow(acc);
                for (const auto& [dq, c] : d_graphs(term.quotient, flavor)) {
                    if (!flavor.admits_basis_graph(dq)) continue;
                    TensorTerm t2 = term;
                    t2.quotient = dq;
                    std::vector<int> key2 = t2.key();
                    Rational& slot = rhs[key2];
                    slot += tc.second * c * sign;
                    if (slot == 0) rhs.erase(key2);
                }
            }
            if (!(lhs == rhs)) {
                if (witness) *witness = "comodule square fails for " + graph_literal(g, Rational(1), flavor.algebra);
                return false;
            }
        }
    }
    return true;
}

bool check_loop_order_monotone(const ComplexFlavor& flavor, int n_ext, int max_internal, int max_edges,
                               std::string* witness) {
    for (const DecoratedGraph& g : sample_basis_graphs(flavor, n_ext, max_internal, max_edges, 3)) {
        const int base = loop_order(g);
        for (const auto& [h, c] : d_graphs(g, flavor))
            if (loop_order(h) > base) {
                if (witness) *witness = "loop order grows for " + graph_literal(g, Rational(1), flavor.algebra);
                return false;
            }
    }
    return true;
}

TensorSum coact_graphs(const DecoratedGraph& g, const ComplexFlavor& flavor, const CocompositionShape& shape) {
    if (flavor.kind == FlavorKind::GraphsM_NoTadpole)
        throw FlavorViolation("the tadpole-free flavor carries no coaction");
    if (flavor.uses_algebra() && flavor.algebra->euler_characteristic() != 0 && flavor.kind != FlavorKind::BV)
        throw FlavorViolation("no coaction without tadpoles: the Euler characteristic of " +
                              flavor_name(flavor.kind) + "'s algebra does not vanish");
    DeinsertionPolicy policy;
    policy.quotient_tadpoles = true;
    policy.inserted_tadpoles = false; // the ^*Graphs_D factors are tadpole-free
    TensorSum raw = deinsert(g, shape, policy, flavor.basis_degrees());
    // Keep terms whose quotient stays in the flavor span and whose inserted
    // factors are ^*Graphs_D basis graphs (>=3-valent internal vertices, no
    // internal-only components).
    TensorSum out;
    ComplexFlavor dflavor;
    dflavor.kind = FlavorKind::GraphsD;
    dflavor.D = flavor.D;
    dflavor.init();
    for (const auto& [key, tc] : raw) {
        const TensorTerm& term = tc.first;
        if (!flavor.admits_basis_graph(term.quotient)) continue;
        bool ok = true;
        for (const DecoratedGraph& f : term.inserted)
            if (!dflavor.admits_basis_graph(f)) ok = false;
        if (!ok) continue;
        add_tensor(out, term, tc.second);
    }
    return out;
}

} // namespace confgc
