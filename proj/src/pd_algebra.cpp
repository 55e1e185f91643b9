#include "confgc/pd_algebra.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "confgc/errors.hpp"

namespace confgc {

using ordered_json = nlohmann::ordered_json;

int PDAlgebra::basis_index(const std::string& id) const {
    for (int i = 0; i < n_basis(); ++i)
        if (ids_[static_cast<size_t>(i)] == id) return i;
    throw ParseError(0, "unknown basis id '" + id + "'");
}

Rational PDAlgebra::pairing(int i, int j) const {
    for (const auto& [k, c] : product(i, j))
        if (k == volume_) return c;
    return Rational(0);
}

Rational PDAlgebra::counit_of_product(const std::vector<int>& factors) const {
    // Fold left to right as a linear combination of basis elements.
    std::map<int, Rational> acc;
    acc[unit_] = 1;
    for (int f : factors) {
        std::map<int, Rational> next;
        for (const auto& [b, c] : acc)
            for (const auto& [k, ck] : product(b, f)) {
                Rational& slot = next[k];
                slot += c * ck;
                if (slot == 0) next.erase(k);
            }
        acc = std::move(next);
    }
    auto it = acc.find(volume_);
    return it == acc.end() ? Rational(0) : it->second;
}

long PDAlgebra::euler_characteristic() const {
    long chi = 0;
    for (int d : degrees_) chi += (d % 2 == 0) ? 1 : -1;
    return chi;
}

std::vector<std::string> PDAlgebra::validate() const {
    std::vector<std::string> bad;
    const int n = n_basis();
    if (unit_ < 0 || volume_ < 0) {
        bad.push_back("missing unit or volume element");
        return bad;
    }
    if (degrees_[static_cast<size_t>(unit_)] != 0) bad.push_back("unit must have degree 0");
    if (degrees_[static_cast<size_t>(volume_)] != dim_) bad.push_back("volume must have degree D");
    int deg0 = 0, degD = 0;
    for (int d : degrees_) {
        if (d == 0) ++deg0;
        if (d == dim_) ++degD;
        if (d < 0 || d > dim_) bad.push_back("basis degree out of range [0, D]");
    }
    if (deg0 != 1) bad.push_back("not connected: degree-0 part must be spanned by the unit alone");
    if (degD != 1) bad.push_back("degree-D part must be one dimensional (volume)");

    auto deg_of = [&](int i) { return degrees_[static_cast<size_t>(i)]; };
    // Grading and unit.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (const auto& [k, c] : product(i, j)) {
                if (c == 0) continue;
                if (deg_of(k) != deg_of(i) + deg_of(j))
                    bad.push_back("product not graded at (" + ids_[static_cast<size_t>(i)] + "," +
                                  ids_[static_cast<size_t>(j)] + ")");
            }
        }
        const auto& ui = product(unit_, i);
        if (ui.size() != 1 || ui[0].first != i || ui[0].second != 1)
            bad.push_back("unit law fails at " + ids_[static_cast<size_t>(i)]);
    }
    // Graded commutativity: e_i e_j = (-1)^{|i||j|} e_j e_i.
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::map<int, Rational> lhs, rhs;
            for (const auto& [k, c] : product(i, j)) lhs[k] += c;
            int s = (deg_of(i) % 2 && deg_of(j) % 2) ? -1 : 1;
            for (const auto& [k, c] : product(j, i)) rhs[k] += c * s;
            if (lhs != rhs)
                bad.push_back("graded commutativity fails with witness (" + ids_[static_cast<size_t>(i)] + "," +
                              ids_[static_cast<size_t>(j)] + ")");
        }
    // Associativity on all triples.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::map<int, Rational> lhs, rhs;
                for (const auto& [m, c] : product(i, j))
                    for (const auto& [q, cq] : product(m, k)) lhs[q] += c * cq;
                for (const auto& [m, c] : product(j, k))
                    for (const auto& [q, cq] : product(i, m)) rhs[q] += c * cq;
                std::erase_if(lhs, [](const auto& p) { return p.second == 0; });
                std::erase_if(rhs, [](const auto& p) { return p.second == 0; });
                if (lhs != rhs)
                    bad.push_back("associativity fails with witness (" + ids_[static_cast<size_t>(i)] + "," +
                                  ids_[static_cast<size_t>(j)] + "," + ids_[static_cast<size_t>(k)] + ")");
            }
    // Nondegeneracy: the pairing matrix between complementary degrees must be
    // invertible; equivalently the full n x n matrix eps(e_i e_j) is.
    {
        // Gaussian elimination over Q on a dense copy.
        std::vector<std::vector<Rational>> m(static_cast<size_t>(n), std::vector<Rational>(static_cast<size_t>(n), Rational(0)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = pairing(i, j);
        int rank = 0;
        for (int c = 0; c < n; ++c) {
            int pr = -1;
            for (int r = rank; r < n; ++r)
                if (m[static_cast<size_t>(r)][static_cast<size_t>(c)] != 0) {
                    pr = r;
                    break;
                }
            if (pr < 0) continue;
            std::swap(m[static_cast<size_t>(pr)], m[static_cast<size_t>(rank)]);
            for (int r = 0; r < n; ++r) {
                if (r == rank || m[static_cast<size_t>(r)][static_cast<size_t>(c)] == 0) continue;
                Rational f = m[static_cast<size_t>(r)][static_cast<size_t>(c)] / m[static_cast<size_t>(rank)][static_cast<size_t>(c)];
                for (int cc = 0; cc < n; ++cc)
                    m[static_cast<size_t>(r)][static_cast<size_t>(cc)] -= f * m[static_cast<size_t>(rank)][static_cast<size_t>(cc)];
            }
            ++rank;
        }
        if (rank != n) bad.push_back("nondegeneracy violation: pairing matrix has rank " + std::to_string(rank));
    }
    return bad;
}

PDAlgebra PDAlgebra::make(int dimension, std::vector<std::string> ids, std::vector<int> degrees,
                          std::string unit_id, std::string volume_id,
                          std::vector<std::tuple<int, int, std::vector<std::pair<int, Rational>>>> products,
                          bool validate_now) {
    PDAlgebra a;
    a.dim_ = dimension;
    a.ids_ = std::move(ids);
    a.degrees_ = std::move(degrees);
    {
        std::set<std::string> seen;
        for (const auto& id : a.ids_)
            if (!seen.insert(id).second) throw ParseError(0, "duplicate basis id '" + id + "'");
    }
    a.unit_ = a.basis_index(unit_id);
    a.volume_ = a.basis_index(volume_id);
    const size_t n = a.ids_.size();
    a.products_.assign(n, std::vector<std::vector<std::pair<int, Rational>>>(n));
    // Unit products are implied.
    for (size_t i = 0; i < n; ++i) {
        a.products_[static_cast<size_t>(a.unit_)][i] = {{static_cast<int>(i), Rational(1)}};
        a.products_[i][static_cast<size_t>(a.unit_)] = {{static_cast<int>(i), Rational(1)}};
    }
    for (auto& [i, j, terms] : products) {
        std::erase_if(terms, [](const auto& t) { return t.second == 0; });
        a.products_[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::move(terms);
    }
    if (validate_now) {
        auto bad = a.validate();
        if (!bad.empty()) throw ValidationError(bad);
    }
    return a;
}

bool PDAlgebra::same_as(const PDAlgebra& o) const {
    if (dim_ != o.dim_ || ids_ != o.ids_ || degrees_ != o.degrees_ || unit_ != o.unit_ || volume_ != o.volume_)
        return false;
    for (size_t i = 0; i < ids_.size(); ++i)
        for (size_t j = 0; j < ids_.size(); ++j)
            if (products_[i][j] != o.products_[i][j]) return false;
    return true;
}

void PDAlgebra::save(std::ostream& os) const {
    ordered_json j;
    j["dimension"] = dim_;
    j["basis"] = ordered_json::array();
    for (int i = 0; i < n_basis(); ++i)
        j["basis"].push_back({{"id", ids_[static_cast<size_t>(i)]}, {"degree", degrees_[static_cast<size_t>(i)]}});
    j["unit"] = ids_[static_cast<size_t>(unit_)];
    j["volume"] = ids_[static_cast<size_t>(volume_)];
    j["products"] = ordered_json::array();
    for (int i = 0; i < n_basis(); ++i)
        for (int k = 0; k < n_basis(); ++k) {
            if (i == unit_ || k == unit_) continue;
            const auto& terms = product(i, k);
            if (terms.empty()) continue;
            ordered_json out = ordered_json::array();
            for (const auto& [b, c] : terms)
                out.push_back({{"id", ids_[static_cast<size_t>(b)]}, {"coeff", rational_to_string(c)}});
            j["products"].push_back({{"left", ids_[static_cast<size_t>(i)]},
                                     {"right", ids_[static_cast<size_t>(k)]},
                                     {"out", out}});
        }
    os << j.dump(2) << "\n";
}

PDAlgebra PDAlgebra::load(std::istream& is) {
    ordered_json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("bad JSON: ") + e.what());
    }
    try {
        int dim = j.at("dimension").get<int>();
        std::vector<std::string> ids;
        std::vector<int> degrees;
        for (const auto& b : j.at("basis")) {
            ids.push_back(b.at("id").get<std::string>());
            degrees.push_back(b.at("degree").get<int>());
        }
        std::map<std::string, int> index;
        for (size_t i = 0; i < ids.size(); ++i) {
            if (index.count(ids[i])) throw ParseError(0, "duplicate basis id '" + ids[i] + "'");
            index[ids[i]] = static_cast<int>(i);
        }
        std::vector<std::tuple<int, int, std::vector<std::pair<int, Rational>>>> products;
        for (const auto& p : j.at("products")) {
            auto li = index.find(p.at("left").get<std::string>());
            auto ri = index.find(p.at("right").get<std::string>());
            if (li == index.end() || ri == index.end()) throw ParseError(0, "product references unknown basis id");
            std::vector<std::pair<int, Rational>> out;
            for (const auto& t : p.at("out")) {
                auto oi = index.find(t.at("id").get<std::string>());
                if (oi == index.end()) throw ParseError(0, "product output references unknown basis id");
                out.push_back({oi->second, parse_rational(t.at("coeff").get<std::string>())});
            }
            products.push_back({li->second, ri->second, std::move(out)});
        }
        return make(dim, std::move(ids), std::move(degrees), j.at("unit").get<std::string>(),
                    j.at("volume").get<std::string>(), std::move(products));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("bad PD-algebra file: ") + e.what());
    }
}

void PDAlgebra::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    save(os);
}

PDAlgebra PDAlgebra::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path);
    return load(is);
}

DiagonalClass diagonal(const PDAlgebra& a) {
    const int n = a.n_basis();
    // Invert the pairing matrix P_{ij} = eps(e_i e_j).
    std::vector<std::vector<Rational>> m(static_cast<size_t>(n), std::vector<Rational>(static_cast<size_t>(2 * n), Rational(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = a.pairing(i, j);
        m[static_cast<size_t>(i)][static_cast<size_t>(n + i)] = 1;
    }
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        for (int r = c; r < n; ++r)
            if (m[static_cast<size_t>(r)][static_cast<size_t>(c)] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) throw SingularPairing("pairing matrix not invertible");
        std::swap(m[static_cast<size_t>(pr)], m[static_cast<size_t>(c)]);
        Rational piv = m[static_cast<size_t>(c)][static_cast<size_t>(c)];
        for (int cc = 0; cc < 2 * n; ++cc) m[static_cast<size_t>(c)][static_cast<size_t>(cc)] /= piv;
        for (int r = 0; r < n; ++r) {
            if (r == c || m[static_cast<size_t>(r)][static_cast<size_t>(c)] == 0) continue;
            Rational f = m[static_cast<size_t>(r)][static_cast<size_t>(c)];
            for (int cc = 0; cc < 2 * n; ++cc)
                m[static_cast<size_t>(r)][static_cast<size_t>(cc)] -= f * m[static_cast<size_t>(c)][static_cast<size_t>(cc)];
        }
    }
    // Delta = sum_i (-1)^{deg e_i} e_i (x) e_i^* with the dual basis defined by
    // eps(e_j e_i^*) = delta_{ij}; in matrix terms the (k, j) coefficient is
    // (-1)^{deg e_k} (P^{-1})_{jk}.
    DiagonalClass d;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            Rational g = m[static_cast<size_t>(j)][static_cast<size_t>(n + k)];
            if (a.basis_degree(k) % 2 != 0) g = -g;
            if (g != 0) d.terms.push_back({k, j, g});
        }
    return d;
}

std::vector<Rational> euler_class(const PDAlgebra& a) {
    std::vector<Rational> out(static_cast<size_t>(a.n_basis()), Rational(0));
    for (const auto& [i, j, g] : diagonal(a).terms)
        for (const auto& [k, c] : a.product(i, j)) out[static_cast<size_t>(k)] += g * c;
    return out;
}

namespace {

PDAlgebra make_sphere(int d) {
    return PDAlgebra::make(d, {"1", "w"}, {0, d}, "1", "w", {{1, 1, {}}});
}

PDAlgebra make_torus2() {
    // Exterior algebra on a, b with ab = w.
    return PDAlgebra::make(2, {"1", "a", "b", "w"}, {0, 1, 1, 2}, "1", "w",
                           {
                               {1, 1, {}},
                               {1, 2, {{3, Rational(1)}}},
                               {2, 1, {{3, Rational(-1)}}},
                               {2, 2, {}},
                               {1, 3, {}},
                               {3, 1, {}},
                               {2, 3, {}},
                               {3, 2, {}},
                               {3, 3, {}},
                           });
}

PDAlgebra make_surface(int genus) {
    std::vector<std::string> ids = {"1"};
    std::vector<int> degrees = {0};
    for (int k = 1; k <= genus; ++k) {
        ids.push_back("a" + std::to_string(k));
        degrees.push_back(1);
    }
    for (int k = 1; k <= genus; ++k) {
        ids.push_back("b" + std::to_string(k));
        degrees.push_back(1);
    }
    ids.push_back("w");
    degrees.push_back(2);
    const int vol = static_cast<int>(ids.size()) - 1;
    std::vector<std::tuple<int, int, std::vector<std::pair<int, Rational>>>> products;
    auto ai = [&](int k) { return k; };            // a_k at index k
    auto bi = [&](int k) { return genus + k; };    // b_k at index genus+k
    for (int k = 1; k <= genus; ++k)
        for (int l = 1; l <= genus; ++l) {
            std::vector<std::pair<int, Rational>> ab, ba, aa, bb;
            if (k == l) {
                ab = {{vol, Rational(1)}};
                ba = {{vol, Rational(-1)}};
            }
            products.push_back({ai(k), bi(l), ab});
            products.push_back({bi(l), ai(k), ba});
            products.push_back({ai(k), ai(l), aa});
            products.push_back({bi(k), bi(l), bb});
        }
    for (int k = 1; k <= genus; ++k) {
        products.push_back({ai(k), vol, {}});
        products.push_back({vol, ai(k), {}});
        products.push_back({bi(k), vol, {}});
        products.push_back({vol, bi(k), {}});
    }
    products.push_back({vol, vol, {}});
    return PDAlgebra::make(2, std::move(ids), std::move(degrees), "1", "w", std::move(products));
}

PDAlgebra make_cp2() {
    return PDAlgebra::make(4, {"1", "h", "h2"}, {0, 2, 4}, "1", "h2",
                           {
                               {1, 1, {{2, Rational(1)}}},
                               {1, 2, {}},
                               {2, 1, {}},
                               {2, 2, {}},
                           });
}

PDAlgebra make_sphere_product(int p, int q) {
    // H(S^p x S^q); for p == q the two middle classes have the same degree.
    int sgn = (p % 2 && q % 2) ? -1 : 1;
    return PDAlgebra::make(p + q, {"1", "x", "y", "xy"}, {0, p, q, p + q}, "1", "xy",
                           {
                               {1, 1, {}},
                               {2, 2, {}},
                               {1, 2, {{3, Rational(1)}}},
                               {2, 1, {{3, Rational(sgn)}}},
                               {1, 3, {}},
                               {3, 1, {}},
                               {2, 3, {}},
                               {3, 2, {}},
                               {3, 3, {}},
                           });
}

} // namespace

PDAlgebra builtin(const std::string& name) {
    if (name.rfind("S^", 0) == 0) {
        std::string rest = name.substr(2);
        size_t x = rest.find("xS^");
        if (x == std::string::npos) {
            try {
                int d = std::stoi(rest);
                if (d >= 1) return make_sphere(d);
            } catch (...) {
            }
            throw UnknownBuiltin(name);
        }
        try {
            int p = std::stoi(rest.substr(0, x));
            int q = std::stoi(rest.substr(x + 3));
            if (p >= 1 && q >= 1) return make_sphere_product(p, q);
        } catch (...) {
        }
        throw UnknownBuiltin(name);
    }
    if (name == "T^2") return make_torus2();
    if (name.rfind("Sigma_", 0) == 0) {
        try {
            int g = std::stoi(name.substr(6));
            if (g == 1) return make_torus2();
            if (g >= 2) return make_surface(g);
        } catch (...) {
        }
        throw UnknownBuiltin(name);
    }
    if (name == "CP^2") return make_cp2();
    throw UnknownBuiltin(name);
}

} // namespace confgc
