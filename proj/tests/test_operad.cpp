#include <doctest.h>

#include "confgc/enumerate.hpp"
#include "confgc/errors.hpp"
#include "confgc/operad.hpp"

using namespace confgc;

namespace {

DecoratedGraph edge12(int D) { return DecoratedGraph{2, 0, D, {{0, 1}}, {}}; }

GraphSum singleton(const DecoratedGraph& g, const std::vector<int>& degrees) {
    GraphSum s;
    add_term(s, g, Rational(1), degrees);
    return s;
}

} // namespace

TEST_CASE("d_gra of a single edge over S^2") {
    PDAlgebra s2 = builtin("S^2");
    GraphSum d = d_gra(edge12(2), s2);
    // (w at 1) + (w at 2), no two-decoration terms
    REQUIRE(d.size() == 2);
    int w = s2.basis_index("w");
    for (const auto& [g, c] : d) {
        CHECK(c == Rational(1));
        CHECK(g.edges.empty());
        REQUIRE(g.decorations.size() == 1);
        CHECK(g.decorations[0].basis == w);
    }
}

TEST_CASE("d_gra of a single edge over T^2 matches the diagonal expansion") {
    PDAlgebra t2 = builtin("T^2");
    int a = t2.basis_index("a"), b = t2.basis_index("b"), w = t2.basis_index("w");
    GraphSum d = d_gra(edge12(2), t2);
    // (w at 1) + (w at 2) - (a at 1, b at 2) + (b at 1, a at 2)
    REQUIRE(d.size() == 4);
    auto coeff = [&](std::vector<Decoration> decs) {
        DecoratedGraph g{2, 0, 2, {}, std::move(decs)};
        CanonResult c = canonicalize(g, t2.degrees());
        REQUIRE_FALSE(c.zero);
        auto it = d.find(c.graph);
        REQUIRE(it != d.end());
        return it->second * c.sign;
    };
    CHECK(coeff({{0, w}}) == Rational(1));
    CHECK(coeff({{1, w}}) == Rational(1));
    CHECK(coeff({{0, a}, {1, b}}) == Rational(-1));
    CHECK(coeff({{0, b}, {1, a}}) == Rational(1));
}

TEST_CASE("d_gra of an edgeless graph vanishes; decorations are closed") {
    PDAlgebra t2 = builtin("T^2");
    DecoratedGraph g{2, 0, 2, {}, {{0, t2.basis_index("a")}}};
    CHECK(d_gra(g, t2).empty());
}

TEST_CASE("d_gra squares to zero on small graphs") {
    for (const char* name : {"S^2", "T^2"}) {
        PDAlgebra alg = builtin(name);
        EnumConstraints cons;
        cons.ext_tadpole_ok.assign(3, true);
        cons.forbid_internal_only_components = false;
        for (int deg = 0; deg <= 4; ++deg) {
            for (const DecoratedGraph& g : enumerate_graphs(3, 2, cons, 0, deg, &alg)) {
                if (g.edges.size() > 2) continue;
                GraphSum dd;
                for (const auto& [h, c] : d_gra(g, alg)) add_sum(dd, d_gra(h, alg), c);
                CHECK(dd.empty());
            }
        }
    }
}

TEST_CASE("cocompose of s^{12}: merged and singleton shapes") {
    DecoratedGraph g = edge12(2);
    // merge {1,2}: (1-vertex graph) (x) s^{12} + (tadpole) (x) (two bare vertices)
    CocompositionShape merge{{{0, 1}}};
    TensorSum t = cocompose(g, merge);
    REQUIRE(t.size() == 2);
    bool saw_edge_inserted = false, saw_tadpole_quotient = false;
    for (const auto& [key, tc] : t) {
        const TensorTerm& term = tc.first;
        REQUIRE(term.inserted.size() == 1);
        if (term.quotient.edges.empty()) {
            CHECK(term.inserted[0].edges.size() == 1);
            CHECK(tc.second == Rational(1));
            saw_edge_inserted = true;
        } else {
            REQUIRE(term.quotient.edges.size() == 1);
            CHECK(term.quotient.edges[0].tail == term.quotient.edges[0].head);
            CHECK(term.inserted[0].edges.empty());
            CHECK(tc.second == Rational(1));
            saw_tadpole_quotient = true;
        }
    }
    CHECK(saw_edge_inserted);
    CHECK(saw_tadpole_quotient);

    // singleton blocks: s^{12} (x) 1 (x) 1
    TensorSum s = cocompose(g, CocompositionShape::singletons(2));
    REQUIRE(s.size() == 1);
    const TensorTerm& term = s.begin()->second.first;
    CHECK(term.quotient.edges.size() == 1);
    CHECK(term.inserted.size() == 2);
    CHECK(term.inserted[0].edges.empty());
    CHECK(term.inserted[1].edges.empty());

    // edgeless graph: single term, edgeless everywhere
    DecoratedGraph empty{3, 0, 2, {}, {}};
    TensorSum e = cocompose(empty, CocompositionShape{{{0, 2}, {1}}});
    REQUIRE(e.size() == 1);
    CHECK(e.begin()->second.first.quotient.edges.empty());
}

TEST_CASE("coact on s^{11}: the tadpole stays on the module factor") {
    DecoratedGraph tadpole{1, 0, 2, {{0, 0}}, {}};
    TensorSum t = coact(tadpole, CocompositionShape::singletons(1), {});
    REQUIRE(t.size() == 1);
    CHECK(t.begin()->second.first.quotient.edges.size() == 1);
    CHECK(t.begin()->second.first.inserted[0].edges.empty());
    // the BV version also has the 1 (x) s^{11} term
    TensorSum bv = cocompose(tadpole, CocompositionShape::singletons(1));
    CHECK(bv.size() == 2);
}

TEST_CASE("coact distributes decorations to the module factor") {
    PDAlgebra t2 = builtin("T^2");
    DecoratedGraph g{2, 0, 2, {}, {{0, t2.basis_index("a")}, {1, t2.basis_index("b")}}};
    TensorSum t = coact(g, CocompositionShape{{{0, 1}}}, t2.degrees());
    REQUIRE(t.size() == 1);
    const TensorTerm& term = t.begin()->second.first;
    CHECK(term.quotient.decorations.size() == 2);
    CHECK(term.inserted[0].decorations.empty());
}

TEST_CASE("cocomposition coassociativity, n <= 4, <= 3 edges") {
    for (int D : {2, 3}) {
        for (int n = 1; n <= 4; ++n) {
            std::string witness;
            bool ok = check_coassociativity(n, D, 3, true, &witness);
            INFO(witness);
            CHECK(ok);
        }
    }
}

TEST_CASE("comodule compatibility square at the Gra level") {
    for (const char* name : {"S^2", "T^2"}) {
        PDAlgebra alg = builtin(name);
        for (int n = 1; n <= 3; ++n) {
            std::string witness;
            bool ok = check_gra_comodule_compat(alg, n, 2, 2, &witness);
            INFO(witness);
            CHECK(ok);
        }
    }
}

TEST_CASE("coact vs d_gra on s^{12} commute (the section 3 diagram)") {
    PDAlgebra s2 = builtin("S^2");
    std::string witness;
    CHECK(check_gra_comodule_compat(s2, 2, 1, 1, &witness));
}

TEST_CASE("d_gra rejects internal vertices") {
    PDAlgebra s2 = builtin("S^2");
    DecoratedGraph g{1, 1, 2, {{0, 1}}, {}};
    CHECK_THROWS_AS(d_gra(g, s2), FlavorViolation);
}
