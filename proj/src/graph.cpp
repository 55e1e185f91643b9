#include "confgc/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

#include "confgc/errors.hpp"
#include "confgc/pd_algebra.hpp"

namespace confgc {

std::vector<int> DecoratedGraph::encoding() const {
    std::vector<int> enc;
    enc.reserve(4 + 2 * edges.size() + 2 * decorations.size());
    enc.push_back(n_ext);
    enc.push_back(n_int);
    enc.push_back(ambient_dim);
    enc.push_back(static_cast<int>(edges.size()));
    for (const Edge& e : edges) {
        enc.push_back(e.tail);
        enc.push_back(e.head);
    }
    for (const Decoration& d : decorations) {
        enc.push_back(d.vertex);
        enc.push_back(d.basis);
    }
    return enc;
}

int star_degree(const DecoratedGraph& g, const std::vector<int>& basis_degrees) {
    int deg = (g.ambient_dim - 1) * static_cast<int>(g.edges.size()) - g.ambient_dim * g.n_int;
    for (const Decoration& d : g.decorations) deg += basis_degrees.at(static_cast<size_t>(d.basis));
    return deg;
}

std::vector<int> connected_components(const DecoratedGraph& g, int* n_components) {
    std::vector<int> parent(static_cast<size_t>(g.n_vertices()));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v) {
            parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            v = parent[static_cast<size_t>(v)];
        }
        return v;
    };
    for (const Edge& e : g.edges) {
        int a = find(e.tail), b = find(e.head);
        if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
    }
    std::vector<int> comp(static_cast<size_t>(g.n_vertices()));
    std::map<int, int> index;
    for (int v = 0; v < g.n_vertices(); ++v) {
        int root = find(v);
        auto [it, fresh] = index.emplace(root, static_cast<int>(index.size()));
        comp[static_cast<size_t>(v)] = it->second;
    }
    if (n_components) *n_components = static_cast<int>(index.size());
    return comp;
}

int loop_order(const DecoratedGraph& g) {
    int c = 0;
    connected_components(g, &c);
    return static_cast<int>(g.edges.size()) - g.n_vertices() + c;
}

namespace {

// Koszul sign of sorting `degs` (paired with keys) stably: product over
// inverted pairs of (-1)^{deg_i deg_j}. Quadratic, fine at our sizes.
template <typename Key>
int koszul_sort_sign(std::vector<std::pair<Key, int>>& items) {
    int sign = 1;
    const size_t n = items.size();
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (items[j].first < items[i].first && (items[i].second % 2) && (items[j].second % 2)) sign = -sign;
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return sign;
}

} // namespace

CanonResult canonicalize(const DecoratedGraph& g, const std::vector<int>& basis_degrees) {
    const int D = g.ambient_dim;
    const bool odd_edges = ((D - 1) % 2) != 0; // edge generators have degree D-1

    // Labeling-independent vanishing.
    if (D % 2 == 1) {
        for (const Edge& e : g.edges)
            if (e.tail == e.head) return {}; // s^{ii} = -s^{ii}
    }
    if (odd_edges) {
        std::vector<std::pair<int, int>> pairs;
        for (const Edge& e : g.edges) pairs.push_back({std::min(e.tail, e.head), std::max(e.tail, e.head)});
        std::sort(pairs.begin(), pairs.end());
        if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) return {}; // odd square
    }
    {
        std::vector<std::pair<int, int>> decs;
        for (const Decoration& d : g.decorations) decs.push_back({d.vertex, d.basis});
        std::sort(decs.begin(), decs.end());
        for (size_t i = 0; i + 1 < decs.size(); ++i)
            if (decs[i] == decs[i + 1] && basis_degrees.at(static_cast<size_t>(decs[i].second)) % 2 != 0)
                return {}; // odd decoration squared
    }

    std::vector<int> perm(static_cast<size_t>(g.n_int));
    std::iota(perm.begin(), perm.end(), 0);

    std::optional<std::vector<int>> best_enc;
    int best_sign = 1;
    DecoratedGraph best_graph;
    bool is_zero = false;

    std::vector<std::pair<std::pair<int, int>, int>> edge_items;
    std::vector<std::pair<std::pair<int, int>, int>> dec_items;

    do {
        auto relabel = [&](int v) {
            return v < g.n_ext ? v : g.n_ext + perm[static_cast<size_t>(v - g.n_ext)];
        };
        int sign = 1;
        // For odd D the internal vertices are odd generators themselves, so
        // the orientation includes their ordering: relabeling contributes the
        // sign of the permutation.
        if (D % 2 != 0) {
            long inv = 0;
            for (size_t a = 0; a + 1 < perm.size(); ++a)
                for (size_t b = a + 1; b < perm.size(); ++b)
                    if (perm[a] > perm[b]) ++inv;
            sign *= neg_one_pow(inv);
        }
        edge_items.clear();
        for (const Edge& e : g.edges) {
            int t = relabel(e.tail), h = relabel(e.head);
            if (t > h) {
                std::swap(t, h);
                sign *= neg_one_pow(D);
            }
            edge_items.push_back({{t, h}, D - 1});
        }
        sign *= koszul_sort_sign(edge_items);
        dec_items.clear();
        for (const Decoration& d : g.decorations)
            dec_items.push_back({{relabel(d.vertex), d.basis}, basis_degrees.at(static_cast<size_t>(d.basis))});
        sign *= koszul_sort_sign(dec_items);

        std::vector<int> enc;
        enc.reserve(2 * edge_items.size() + 2 * dec_items.size());
        for (const auto& [key, deg] : edge_items) {
            enc.push_back(key.first);
            enc.push_back(key.second);
        }
        enc.push_back(-1);
        for (const auto& [key, deg] : dec_items) {
            enc.push_back(key.first);
            enc.push_back(key.second);
        }

        if (!best_enc || enc < *best_enc) {
            best_enc = std::move(enc);
            best_sign = sign;
            best_graph = DecoratedGraph{g.n_ext, g.n_int, D, {}, {}};
            for (const auto& [key, deg] : edge_items) best_graph.edges.push_back({key.first, key.second});
            for (const auto& [key, deg] : dec_items) best_graph.decorations.push_back({key.first, key.second});
            is_zero = false;
        } else if (enc == *best_enc && sign != best_sign) {
            is_zero = true; // fixed by an odd symmetry
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (is_zero || !best_enc) return {};
    return {false, std::move(best_graph), best_sign};
}

CanonResult act_symmetric_group(const std::vector<int>& perm, const DecoratedGraph& g,
                                const std::vector<int>& basis_degrees) {
    if (static_cast<int>(perm.size()) != g.n_ext) throw DimensionMismatch("act_symmetric_group: perm size");
    DecoratedGraph h = g;
    auto relabel = [&](int v) { return v < g.n_ext ? perm[static_cast<size_t>(v)] : v; };
    for (Edge& e : h.edges) {
        e.tail = relabel(e.tail);
        e.head = relabel(e.head);
    }
    for (Decoration& d : h.decorations) d.vertex = relabel(d.vertex);
    return canonicalize(h, basis_degrees);
}

void add_term(GraphSum& sum, const DecoratedGraph& raw, const Rational& coeff,
              const std::vector<int>& basis_degrees) {
    if (coeff == 0) return;
    CanonResult c = canonicalize(raw, basis_degrees);
    if (c.zero) return;
    Rational& slot = sum[c.graph];
    slot += coeff * c.sign;
    if (slot == 0) sum.erase(c.graph);
}

void scale(GraphSum& sum, const Rational& c) {
    if (c == 0) {
        sum.clear();
        return;
    }
    for (auto& [g, v] : sum) v *= c;
}

void add_sum(GraphSum& into, const GraphSum& other, const Rational& c) {
    for (const auto& [g, v] : other) {
        Rational& slot = into[g];
        slot += v * c;
        if (slot == 0) into.erase(g);
    }
}

CutResult cut_internal_components(const DecoratedGraph& g, const std::vector<int>& basis_degrees) {
    int n_comp = 0;
    std::vector<int> comp = connected_components(g, &n_comp);
    std::vector<bool> has_ext(static_cast<size_t>(n_comp), false);
    for (int v = 0; v < g.n_ext; ++v) has_ext[static_cast<size_t>(comp[static_cast<size_t>(v)])] = true;

    // Destination block per generator: internal-only components in order of
    // their smallest vertex (== component index order), then the rest.
    std::vector<int> block_of_comp(static_cast<size_t>(n_comp), -1);
    int n_cut = 0;
    for (int c = 0; c < n_comp; ++c)
        if (!has_ext[static_cast<size_t>(c)]) block_of_comp[static_cast<size_t>(c)] = n_cut++;
    for (int c = 0; c < n_comp; ++c)
        if (has_ext[static_cast<size_t>(c)]) block_of_comp[static_cast<size_t>(c)] = n_cut;

    CutResult res;
    if (n_cut == 0) {
        res.rest = g;
        return res;
    }

    // Koszul sign of the stable partition of the generator list ([internal
    // vertices] then [edges] then [decorations]) by destination block;
    // internal vertices carry degree D (odd generators for odd D).
    std::vector<std::pair<int, int>> gens; // (block, degree)
    for (int v = g.n_ext; v < g.n_vertices(); ++v)
        gens.push_back({block_of_comp[static_cast<size_t>(comp[static_cast<size_t>(v)])], g.ambient_dim});
    for (const Edge& e : g.edges)
        gens.push_back({block_of_comp[static_cast<size_t>(comp[static_cast<size_t>(e.tail)])], g.ambient_dim - 1});
    for (const Decoration& d : g.decorations)
        gens.push_back({block_of_comp[static_cast<size_t>(comp[static_cast<size_t>(d.vertex)])],
                        basis_degrees.at(static_cast<size_t>(d.basis))});
    int sign = 1;
    for (size_t i = 0; i + 1 < gens.size(); ++i)
        for (size_t j = i + 1; j < gens.size(); ++j)
            if (gens[j].first < gens[i].first && (gens[i].second % 2) && (gens[j].second % 2)) sign = -sign;
    res.sign = sign;

    // Vertex renumbering per block.
    std::vector<int> new_id(static_cast<size_t>(g.n_vertices()), -1);
    std::vector<int> count(static_cast<size_t>(n_cut + 1), 0);
    for (int v = 0; v < g.n_vertices(); ++v) {
        int b = block_of_comp[static_cast<size_t>(comp[static_cast<size_t>(v)])];
        new_id[static_cast<size_t>(v)] = count[static_cast<size_t>(b)]++;
    }
    res.cut.assign(static_cast<size_t>(n_cut), DecoratedGraph{});
    for (int b = 0; b < n_cut; ++b) {
        res.cut[static_cast<size_t>(b)].n_ext = 0;
        res.cut[static_cast<size_t>(b)].n_int = count[static_cast<size_t>(b)];
        res.cut[static_cast<size_t>(b)].ambient_dim = g.ambient_dim;
    }
    res.rest.n_ext = g.n_ext;
    res.rest.n_int = count[static_cast<size_t>(n_cut)] - g.n_ext;
    res.rest.ambient_dim = g.ambient_dim;
    for (const Edge& e : g.edges) {
        int b = block_of_comp[static_cast<size_t>(comp[static_cast<size_t>(e.tail)])];
        Edge ne{new_id[static_cast<size_t>(e.tail)], new_id[static_cast<size_t>(e.head)]};
        if (b == n_cut)
            res.rest.edges.push_back(ne);
        else
            res.cut[static_cast<size_t>(b)].edges.push_back(ne);
    }
    for (const Decoration& d : g.decorations) {
        int b = block_of_comp[static_cast<size_t>(comp[static_cast<size_t>(d.vertex)])];
        Decoration nd{new_id[static_cast<size_t>(d.vertex)], d.basis};
        if (b == n_cut)
            res.rest.decorations.push_back(nd);
        else
            res.cut[static_cast<size_t>(b)].decorations.push_back(nd);
    }
    return res;
}

std::string graph_literal(const DecoratedGraph& g, const Rational& coeff, const PDAlgebra* algebra) {
    std::ostringstream os;
    os << "graph D=" << g.ambient_dim << " ext=" << g.n_ext << " int=" << g.n_int << "; edges=";
    for (const Edge& e : g.edges) os << "(" << e.tail + 1 << "," << e.head + 1 << ")";
    os << ";";
    std::map<int, std::vector<int>> per_vertex;
    for (const Decoration& d : g.decorations) per_vertex[d.vertex].push_back(d.basis);
    for (const auto& [v, ids] : per_vertex) {
        os << " dec[" << v + 1 << "]=";
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i) os << ",";
            os << (algebra ? algebra->basis_id(ids[i]) : std::to_string(ids[i]));
        }
        os << ";";
    }
    os << " coeff=" << rational_to_string(coeff);
    return os.str();
}

namespace {

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

} // namespace

std::pair<DecoratedGraph, Rational> parse_graph_literal(const std::string& text, const PDAlgebra* algebra) {
    DecoratedGraph g;
    Rational coeff(1);
    std::string body = strip(text);
    if (body.rfind("graph", 0) != 0) throw ParseError(1, "graph literal must start with 'graph'");
    body = body.substr(5);
    std::vector<std::string> parts;
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, ';')) parts.push_back(strip(part));
    if (parts.empty()) throw ParseError(1, "empty graph literal");

    auto parse_kv = [&](const std::string& s, const std::string& key) -> std::optional<std::string> {
        if (s.rfind(key + "=", 0) != 0) return std::nullopt;
        return s.substr(key.size() + 1);
    };

    {
        std::stringstream hs(parts[0]);
        std::string tok;
        while (hs >> tok) {
            if (auto v = parse_kv(tok, "D"))
                g.ambient_dim = std::stoi(*v);
            else if (auto v = parse_kv(tok, "ext"))
                g.n_ext = std::stoi(*v);
            else if (auto v = parse_kv(tok, "int"))
                g.n_int = std::stoi(*v);
            else
                throw ParseError(1, "unknown token in graph header: " + tok);
        }
    }
    for (size_t p = 1; p < parts.size(); ++p) {
        const std::string& s = parts[p];
        if (s.empty()) continue;
        if (auto v = parse_kv(s, "edges")) {
            std::string es = *v;
            size_t i = 0;
            while (i < es.size()) {
                if (es[i] != '(') throw ParseError(1, "expected '(' in edges");
                size_t close = es.find(')', i);
                if (close == std::string::npos) throw ParseError(1, "unterminated edge");
                std::string pair = es.substr(i + 1, close - i - 1);
                size_t comma = pair.find(',');
                if (comma == std::string::npos) throw ParseError(1, "edge needs two endpoints");
                int a = std::stoi(pair.substr(0, comma)) - 1;
                int b = std::stoi(pair.substr(comma + 1)) - 1;
                if (a < 0 || b < 0 || a >= g.n_vertices() || b >= g.n_vertices())
                    throw ParseError(1, "edge endpoint out of range");
                g.edges.push_back({a, b});
                i = close + 1;
            }
        } else if (s.rfind("dec[", 0) == 0) {
            size_t close = s.find(']');
            if (close == std::string::npos || s.size() <= close + 1 || s[close + 1] != '=')
                throw ParseError(1, "malformed dec[] clause");
            int v = std::stoi(s.substr(4, close - 4)) - 1;
            if (v < 0 || v >= g.n_vertices()) throw ParseError(1, "dec vertex out of range");
            std::stringstream ds(s.substr(close + 2));
            std::string id;
            while (std::getline(ds, id, ',')) {
                id = strip(id);
                if (id.empty()) continue;
                int basis;
                if (algebra)
                    basis = algebra->basis_index(id);
                else
                    basis = std::stoi(id);
                g.decorations.push_back({v, basis});
            }
        } else if (auto v = parse_kv(s, "coeff")) {
            coeff = parse_rational(*v);
        } else {
            throw ParseError(1, "unknown clause in graph literal: " + s);
        }
    }
    return {g, coeff};
}

} // namespace confgc

