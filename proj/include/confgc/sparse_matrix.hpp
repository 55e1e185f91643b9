#pragma once

#include <iosfwd>
#include <memory>
#include <map>
#include <vector>

#include "confgc/rational.hpp"

namespace confgc {

struct Triplet {
    long row = 0;
    long col = 0;
    Rational value;
};

// Exact sparse matrix over Q. Entries are kept sorted by (row, col), with no
// duplicates and no stored zeros; immutable after construction.
class SparseRationalMatrix {
  public:
    SparseRationalMatrix() = default;
    SparseRationalMatrix(long rows, long cols) : rows_(rows), cols_(cols) {}

    static SparseRationalMatrix from_triplets(long rows, long cols, std::vector<Triplet> entries);

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    const std::vector<Triplet>& entries() const { return entries_; }
    long nnz() const { return static_cast<long>(entries_.size()); }
    bool is_zero() const { return entries_.empty(); }

    SparseRationalMatrix transpose() const;
    SparseRationalMatrix multiply(const SparseRationalMatrix& rhs) const;

    // Keeps the rows/columns listed (in the given order); used for truncated
    // subcomplexes.
    SparseRationalMatrix select(const std::vector<long>& row_ids, const std::vector<long>& col_ids) const;

    // Appends extra columns on the right.
    SparseRationalMatrix augment_columns(const std::vector<std::vector<Rational>>& columns) const;

    std::vector<Rational> apply(const std::vector<Rational>& v) const;

    // Debug text format: header "rows cols nnz" then one "row col num/den" line
    // per entry.
    void dump(std::ostream& os) const;
    static SparseRationalMatrix load(std::istream& is);

  private:
    long rows_ = 0;
    long cols_ = 0;
    std::vector<Triplet> entries_;
};

// Exact rank over Q; fraction-free (Bareiss) elimination with Markowitz
// pivoting, fixed tie-breaking (lowest row, then lowest column).
long rank(const SparseRationalMatrix& m);

// Basis of the right kernel (solutions of m x = 0), deterministic.
std::vector<std::vector<Rational>> kernel_basis(const SparseRationalMatrix& m);

// Forward-eliminates the matrix once and then reduces vectors against the
// echelon; the residual is zero exactly when the vector lies in the column
// span. Used to count cohomology classes without re-eliminating per query.
class ImageReducer {
  public:
    explicit ImageReducer(const SparseRationalMatrix& m);
    ~ImageReducer();
    ImageReducer(ImageReducer&&) noexcept;
    long rank() const;
    // residual of v modulo the column span (length = rows of m)
    std::vector<Rational> reduce(std::vector<Rational> v) const;
    // dimension of span(vs) modulo the column span
    long residual_rank(const std::vector<std::vector<Rational>>& vs) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct InImageResult {
    bool in_image = false;
    std::vector<Rational> witness; // m * witness == v when in_image
};

// Is v in the column span of m? Witness has exactly zero residual.
InImageResult in_image(const SparseRationalMatrix& m, const std::vector<Rational>& v);

struct BettiTable {
    int deg_min = 0;
    int deg_max = -1;
    std::vector<long> dims;
    std::vector<long> betti;
    std::vector<bool> stabilized;

    // Extra diagnostics for truncated complexes (empty when not applicable).
    std::vector<long> betti_plain_kmax;
    std::vector<long> betti_plain_kprobe;
    std::vector<long> dims_probe;
    std::vector<bool> basis_saturated;

    long dim_at(int degree) const { return at(dims, degree); }
    long betti_at(int degree) const { return at(betti, degree); }
    bool stabilized_at(int degree) const {
        if (degree < deg_min || degree > deg_max) return false;
        return stabilized[static_cast<size_t>(degree - deg_min)];
    }

  private:
    long at(const std::vector<long>& v, int degree) const {
        if (degree < deg_min || degree > deg_max) return 0;
        return v[static_cast<size_t>(degree - deg_min)];
    }
};

// Betti numbers of a finite cochain complex given as differentials
// d_k : C^k -> C^{k+1} keyed by k. Checks d_{k+1} o d_k = 0 and throws
// CompositionNotZero on failure. Degrees at the window boundary are flagged
// unstabilized unless the complex is known to vanish beyond them
// (closed_below/closed_above).
BettiTable betti_of_complex(const std::map<int, SparseRationalMatrix>& differentials,
                            bool closed_below = false, bool closed_above = false);

} // namespace confgc
