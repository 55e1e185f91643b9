#pragma once

#include <map>
#include <vector>

#include "confgc/graph.hpp"
#include "confgc/pd_algebra.hpp"
#include "confgc/sparse_matrix.hpp"

namespace confgc {

// A normal-form monomial of F(A, n) = A^{(x)n}[w_ij] / (1)-(4): a j-distinct
// forest of w-generators (each vertex has at most one edge to a smaller
// index, edges oriented (i, j) with i < j and listed sorted) together with one
// A-basis label per vertex; relation (4) slides labels to cluster roots, so
// non-root vertices carry the unit.
struct LSMonomial {
    std::vector<std::pair<int, int>> omegas; // sorted (i, j), i < j
    std::vector<int> labels;                 // basis index per vertex

    std::vector<int> encoding() const;
    bool operator<(const LSMonomial& o) const { return encoding() < o.encoding(); }
    bool operator==(const LSMonomial& o) const { return encoding() == o.encoding(); }
};

using LSSum = std::map<LSMonomial, Rational>;

// The finite Lambrechts-Stanley complex F(A, n).
class LSComplex {
  public:
    LSComplex(const PDAlgebra& algebra, int n);

    const PDAlgebra& algebra() const { return *algebra_; }
    int n_points() const { return n_; }
    int deg_min() const { return 0; }
    int deg_max() const { return deg_max_; }

    const std::vector<LSMonomial>& basis(int degree) const;
    long dim(int degree) const { return static_cast<long>(basis(degree).size()); }
    const SparseRationalMatrix& differential(int degree) const;

    int degree_of(const LSMonomial& m) const;

    // Rewrites an arbitrary raw monomial (w-list in any order/orientation,
    // arbitrary labels) times coeff into normal form.
    LSSum reduce(std::vector<std::pair<int, int>> omegas, std::vector<int> labels, const Rational& coeff) const;

    // nabla extended as a derivation (labels are closed).
    LSSum d(const LSMonomial& m) const;

    long index_of(int degree, const LSMonomial& m) const; // -1 if absent

  private:
    void build();

    const PDAlgebra* algebra_;
    int n_;
    int deg_max_ = 0;
    std::vector<std::vector<LSMonomial>> basis_;
    std::vector<SparseRationalMatrix> diff_;
};

// Exact Betti numbers of F(A, n); no truncation, every degree stabilized.
BettiTable ls_betti(const PDAlgebra& algebra, int n);

// Projection ^*Graphs -> F(A, n): graphs with internal vertices map to zero,
// edges to w_ij, decorations to p_i^*.
LSSum project_graphs_to_F(const DecoratedGraph& g, const Rational& coeff, const LSComplex& target);

// Dimension polynomial coefficients (degree-indexed counts) of the sBG
// recursion: P_0 = 1, P_n = P_{n-1} P_A + (n-1) t^{D-1} P_{n-1}.
struct SBGPolynomial {
    std::vector<long> coefficients;
};
SBGPolynomial sbg_polynomial(const std::vector<long>& poincare_poly, int n, int D);
std::vector<long> poincare_polynomial(const PDAlgebra& algebra);

} // namespace confgc
