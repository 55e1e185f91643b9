#include "confgc/ls_model.hpp"

#include <algorithm>
#include <functional>

#include "confgc/errors.hpp"

namespace confgc {

std::vector<int> LSMonomial::encoding() const {
    std::vector<int> enc;
    enc.push_back(static_cast<int>(omegas.size()));
    for (const auto& [i, j] : omegas) {
        enc.push_back(i);
        enc.push_back(j);
    }
    enc.insert(enc.end(), labels.begin(), labels.end());
    return enc;
}

LSComplex::LSComplex(const PDAlgebra& algebra, int n) : algebra_(&algebra), n_(n) {
    if (n < 1) throw ConfigError("F(A, n) needs n >= 1");
    build();
}

int LSComplex::degree_of(const LSMonomial& m) const {
    int deg = (algebra_->dimension() - 1) * static_cast<int>(m.omegas.size());
    for (int b : m.labels) deg += algebra_->basis_degree(b);
    return deg;
}

LSSum LSComplex::reduce(std::vector<std::pair<int, int>> omegas, std::vector<int> labels,
                        const Rational& coeff) const {
    LSSum out;
    if (coeff == 0) return out;
    const int D = algebra_->dimension();
    struct State {
        std::vector<std::pair<int, int>> w;
        std::vector<int> labels;
        Rational c;
    };
    std::vector<State> work;
    work.push_back({std::move(omegas), std::move(labels), coeff});
    while (!work.empty()) {
        State st = std::move(work.back());
        work.pop_back();
        if (st.c == 0) continue;
        // Orient (i < j), relation (1).
        bool dead = false;
        for (auto& [i, j] : st.w) {
            if (i == j) throw FlavorViolation("omega_ii does not exist");
            if (i > j) {
                std::swap(i, j);
                st.c *= neg_one_pow(D);
            }
        }
        // Sort; edge generators have degree D-1.
        {
            long inversions = 0;
            for (size_t a = 0; a + 1 < st.w.size(); ++a)
                for (size_t b = a + 1; b < st.w.size(); ++b)
                    if (st.w[b] < st.w[a]) ++inversions;
            if ((D - 1) % 2 != 0) st.c *= neg_one_pow(inversions);
            std::sort(st.w.begin(), st.w.end());
        }
        // Relation (2): squares vanish (for both parities).
        for (size_t a = 0; a + 1 < st.w.size() && !dead; ++a)
            if (st.w[a] == st.w[a + 1]) dead = true;
        if (dead) continue;
        // Arnold relation (3): eliminate repeated heads. With i < j < k:
        //   w_ik w_jk = w_ij w_jk - w_ij w_ik.
        long p = -1, q = -1;
        for (size_t a = 0; a + 1 < st.w.size() && p < 0; ++a)
            for (size_t b = a + 1; b < st.w.size(); ++b)
                if (st.w[a].second == st.w[b].second) {
                    p = static_cast<long>(a);
                    q = static_cast<long>(b);
                    break;
                }
        if (p >= 0) {
            const int i = std::min(st.w[static_cast<size_t>(p)].first, st.w[static_cast<size_t>(q)].first);
            const int j = std::max(st.w[static_cast<size_t>(p)].first, st.w[static_cast<size_t>(q)].first);
            const int k = st.w[static_cast<size_t>(p)].second;
            // Move the pair to the front (positions p < q, 0-based).
            Rational c = st.c;
            if ((D - 1) % 2 != 0) c *= neg_one_pow(p + q - 1);
            std::vector<std::pair<int, int>> rest;
            for (long a = 0; a < static_cast<long>(st.w.size()); ++a)
                if (a != p && a != q) rest.push_back(st.w[static_cast<size_t>(a)]);
            // note: the two front edges are (i,k),(j,k) in some order; sorting
            // inside the recursion fixes the order, and swapping them costs
            // (-1)^{D-1}; both orders of the pair represent the same monomial
            // after the sort step, so we can take them as (i,k),(j,k) here.
            std::vector<std::pair<int, int>> t1 = {{i, j}, {j, k}};
            std::vector<std::pair<int, int>> t2 = {{i, j}, {i, k}};
            t1.insert(t1.end(), rest.begin(), rest.end());
            t2.insert(t2.end(), rest.begin(), rest.end());
            work.push_back({std::move(t1), st.labels, c});
            work.push_back({std::move(t2), st.labels, -c});
            continue;
        }
        // Relation (4): slide labels to cluster roots (vertices without a
        // down-edge). Down-edge of v: the unique (u, v) in the forest.
        std::vector<int> parent(static_cast<size_t>(n_), -1);
        for (const auto& [i, j] : st.w) parent[static_cast<size_t>(j)] = i;
        int v_move = -1;
        for (int v = n_ - 1; v >= 0; --v)
            if (parent[static_cast<size_t>(v)] >= 0 && st.labels[static_cast<size_t>(v)] != algebra_->unit()) {
                v_move = v;
                break;
            }
        if (v_move >= 0) {
            const int u = parent[static_cast<size_t>(v_move)];
            const int a = st.labels[static_cast<size_t>(v_move)];
            long crossed = 0;
            for (int s = u + 1; s < v_move; ++s) crossed += algebra_->basis_degree(st.labels[static_cast<size_t>(s)]);
            Rational c = st.c;
            if (algebra_->basis_degree(a) % 2 != 0) c *= neg_one_pow(crossed);
            for (const auto& [k, ck] : algebra_->product(st.labels[static_cast<size_t>(u)], a)) {
                State next = st;
                next.labels[static_cast<size_t>(v_move)] = algebra_->unit();
                next.labels[static_cast<size_t>(u)] = k;
                next.c = c * ck;
                work.push_back(std::move(next));
            }
            continue;
        }
        // Normal form reached.
        LSMonomial m{std::move(st.w), std::move(st.labels)};
        Rational& slot = out[m];
        slot += st.c;
        if (slot == 0) out.erase(m);
    }
    return out;
}

LSSum LSComplex::d(const LSMonomial& m) const {
    LSSum out;
    const int D = algebra_->dimension();
    const DiagonalClass delta_class = diagonal(*algebra_);
    for (size_t t = 0; t < m.omegas.size(); ++t) {
        Rational base(neg_one_pow(static_cast<long>(D - 1) * static_cast<long>(t)));
        const int i = m.omegas[t].first;
        const int j = m.omegas[t].second;
        std::vector<std::pair<int, int>> rest;
        for (size_t s = 0; s < m.omegas.size(); ++s)
            if (s != t) rest.push_back(m.omegas[s]);
        for (const auto& [alpha, beta, gval] : delta_class.terms) {
            // Insert e_beta at slot j first (it sits to the right of e_alpha),
            // then e_alpha at slot i; both arrive from the left of the label.
            std::vector<int> labels = m.labels;
            Rational c = base * gval;
            auto insert_left = [&](int slot, int b) -> std::vector<std::pair<int, Rational>> {
                long crossed = 0;
                for (int s = 0; s < slot; ++s) crossed += algebra_->basis_degree(labels[static_cast<size_t>(s)]);
                std::vector<std::pair<int, Rational>> prods;
                int sgn = (algebra_->basis_degree(b) % 2 != 0) ? neg_one_pow(crossed) : 1;
                for (const auto& [k, ck] : algebra_->product(b, labels[static_cast<size_t>(slot)]))
                    prods.push_back({k, ck * sgn});
                return prods;
            };
            for (const auto& [kb, cb] : insert_left(j, beta)) {
                std::vector<int> labels2 = labels;
                labels2[static_cast<size_t>(j)] = kb;
                // recompute crossing for alpha against updated labels
                long crossed = 0;
                for (int s = 0; s < i; ++s) crossed += algebra_->basis_degree(labels2[static_cast<size_t>(s)]);
                int sgn = (algebra_->basis_degree(alpha) % 2 != 0) ? neg_one_pow(crossed) : 1;
                for (const auto& [ka, ca] : algebra_->product(alpha, labels2[static_cast<size_t>(i)])) {
                    std::vector<int> labels3 = labels2;
                    labels3[static_cast<size_t>(i)] = ka;
                    for (auto& [mm, cc] : reduce(rest, labels3, c * cb * ca * sgn)) {
                        Rational& slot = out[mm];
                        slot += cc;
                        if (slot == 0) out.erase(mm);
                    }
                }
            }
        }
    }
    return out;
}

void LSComplex::build() {
    // Forests: parent[v] in {-1, 0..v-1}; labels: any basis element at
    // root vertices (no down-edge), the unit elsewhere.
    std::vector<std::vector<LSMonomial>> by_degree;
    std::vector<int> parent(static_cast<size_t>(n_), -1);
    std::function<void(int)> rec_forest = [&](int v) {
        if (v == n_) {
            std::vector<std::pair<int, int>> w;
            for (int u = 1; u < n_; ++u)
                if (parent[static_cast<size_t>(u)] >= 0) w.push_back({parent[static_cast<size_t>(u)], u});
            std::sort(w.begin(), w.end());
            std::vector<int> labels(static_cast<size_t>(n_), algebra_->unit());
            std::function<void(int)> rec_labels = [&](int u) {
                if (u == n_) {
                    LSMonomial m{w, labels};
                    int deg = degree_of(m);
                    if (deg >= static_cast<int>(by_degree.size())) by_degree.resize(static_cast<size_t>(deg) + 1);
                    by_degree[static_cast<size_t>(deg)].push_back(m);
                    return;
                }
                if (parent[static_cast<size_t>(u)] >= 0) {
                    rec_labels(u + 1); // non-root: unit only
                    return;
                }
                for (int b = 0; b < algebra_->n_basis(); ++b) {
                    labels[static_cast<size_t>(u)] = b;
                    rec_labels(u + 1);
                }
                labels[static_cast<size_t>(u)] = algebra_->unit();
            };
            rec_labels(0);
            return;
        }
        parent[static_cast<size_t>(v)] = -1;
        rec_forest(v + 1);
        for (int u = 0; u < v; ++u) {
            parent[static_cast<size_t>(v)] = u;
            rec_forest(v + 1);
        }
        parent[static_cast<size_t>(v)] = -1;
    };
    rec_forest(1);
    deg_max_ = static_cast<int>(by_degree.size()) - 1;
    basis_ = std::move(by_degree);
    for (auto& graphs : basis_) std::sort(graphs.begin(), graphs.end());

    diff_.resize(basis_.size());
    for (int deg = 0; deg <= deg_max_; ++deg) {
        const auto& src = basis_[static_cast<size_t>(deg)];
        long rows = deg + 1 <= deg_max_ ? dim(deg + 1) : 0;
        std::vector<Triplet> entries;
        for (long col = 0; col < static_cast<long>(src.size()); ++col) {
            for (const auto& [mm, c] : d(src[static_cast<size_t>(col)])) {
                long row = index_of(deg + 1, mm);
                if (row < 0) throw InternalError("LS differential image not in basis");
                entries.push_back({row, col, c});
            }
        }
        diff_[static_cast<size_t>(deg)] =
            SparseRationalMatrix::from_triplets(rows, static_cast<long>(src.size()), std::move(entries));
    }
}

const std::vector<LSMonomial>& LSComplex::basis(int degree) const {
    static const std::vector<LSMonomial> empty;
    if (degree < 0 || degree > deg_max_) return empty;
    return basis_[static_cast<size_t>(degree)];
}

const SparseRationalMatrix& LSComplex::differential(int degree) const {
    static const SparseRationalMatrix empty;
    if (degree < 0 || degree > deg_max_) return empty;
    return diff_[static_cast<size_t>(degree)];
}

long LSComplex::index_of(int degree, const LSMonomial& m) const {
    const auto& b = basis(degree);
    auto it = std::lower_bound(b.begin(), b.end(), m);
    if (it == b.end() || !(*it == m)) return -1;
    return static_cast<long>(it - b.begin());
}

BettiTable ls_betti(const PDAlgebra& algebra, int n) {
    LSComplex cx(algebra, n);
    std::map<int, SparseRationalMatrix> diffs;
    for (int deg = 0; deg <= cx.deg_max(); ++deg) diffs[deg] = cx.differential(deg);
    if (diffs.empty()) {
        BettiTable t;
        t.deg_min = t.deg_max = 0;
        t.dims = {1};
        t.betti = {1};
        t.stabilized = {true};
        return t;
    }
    BettiTable t = betti_of_complex(diffs, true, true);
    // drop the empty degree beyond the top of the finite complex
    while (t.deg_max > cx.deg_max() && !t.dims.empty() && t.dims.back() == 0) {
        t.dims.pop_back();
        t.betti.pop_back();
        t.stabilized.pop_back();
        --t.deg_max;
    }
    return t;
}

LSSum project_graphs_to_F(const DecoratedGraph& g, const Rational& coeff, const LSComplex& target) {
    if (g.n_ext != target.n_points())
        throw DimensionMismatch("projection: graph arity differs from the LS arity");
    if (g.n_int > 0) return {};
    for (const Edge& e : g.edges)
        if (e.tail == e.head) return {}; // tadpoles have no LS image
    std::vector<std::pair<int, int>> w;
    for (const Edge& e : g.edges) w.push_back({e.tail, e.head});
    // Decorations are sorted by (vertex, basis) in canonical graphs, which is
    // already slot order; fold same-slot decorations left to right.
    LSSum out;
    struct State {
        std::vector<int> labels;
        Rational c;
        size_t next = 0;
    };
    std::vector<State> work;
    work.push_back({std::vector<int>(static_cast<size_t>(g.n_ext), target.algebra().unit()), coeff, 0});
    while (!work.empty()) {
        State st = std::move(work.back());
        work.pop_back();
        if (st.next == g.decorations.size()) {
            for (auto& [m, c] : target.reduce(w, st.labels, st.c)) {
                Rational& slot = out[m];
                slot += c;
                if (slot == 0) out.erase(m);
            }
            continue;
        }
        const Decoration& d = g.decorations[st.next];
        for (const auto& [k, ck] : target.algebra().product(st.labels[static_cast<size_t>(d.vertex)], d.basis)) {
            State nx = st;
            nx.labels[static_cast<size_t>(d.vertex)] = k;
            nx.c = st.c * ck;
            nx.next = st.next + 1;
            work.push_back(std::move(nx));
        }
    }
    return out;
}

SBGPolynomial sbg_polynomial(const std::vector<long>& poincare_poly, int n, int D) {
    if (n < 0) throw ConfigError("sbg needs n >= 0");
    std::vector<long> p = {1};
    for (int m = 1; m <= n; ++m) {
        // P_m = P_{m-1} * P_A + (m-1) t^{D-1} P_{m-1}
        std::vector<long> next(p.size() + std::max(poincare_poly.size(), static_cast<size_t>(D)) + 1, 0);
        for (size_t a = 0; a < p.size(); ++a) {
            for (size_t b = 0; b < poincare_poly.size(); ++b) next[a + b] += p[a] * poincare_poly[b];
            next[a + static_cast<size_t>(D - 1)] += static_cast<long>(m - 1) * p[a];
        }
        while (!next.empty() && next.back() == 0) next.pop_back();
        p = std::move(next);
    }
    return {p};
}

std::vector<long> poincare_polynomial(const PDAlgebra& algebra) {
    std::vector<long> p(static_cast<size_t>(algebra.dimension()) + 1, 0);
    for (int b = 0; b < algebra.n_basis(); ++b) p[static_cast<size_t>(algebra.basis_degree(b))]++;
    return p;
}

} // namespace confgc
