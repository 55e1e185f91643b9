#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "confgc/rational.hpp"

namespace confgc {

// A Poincare duality algebra: finite graded basis with product structure
// constants, a distinguished unit (degree 0) and volume element (degree D),
// and the counit eps normalized so eps(volume) = 1. Immutable after
// validation.
class PDAlgebra {
  public:
    int dimension() const { return dim_; }
    int n_basis() const { return static_cast<int>(ids_.size()); }
    const std::string& basis_id(int i) const { return ids_.at(static_cast<size_t>(i)); }
    int basis_degree(int i) const { return degrees_.at(static_cast<size_t>(i)); }
    const std::vector<int>& degrees() const { return degrees_; }
    int unit() const { return unit_; }
    int volume() const { return volume_; }
    int basis_index(const std::string& id) const; // throws ParseError if unknown

    // e_i * e_j as a basis combination.
    const std::vector<std::pair<int, Rational>>& product(int i, int j) const {
        return products_.at(static_cast<size_t>(i)).at(static_cast<size_t>(j));
    }

    // eps(e_i * e_j): the coefficient of the volume element.
    Rational pairing(int i, int j) const;

    // eps of a product of basis elements, folded left to right.
    Rational counit_of_product(const std::vector<int>& factors) const;

    // Euler characteristic sum (-1)^k dim A^k.
    long euler_characteristic() const;

    // Structural checks: graded commutativity, associativity, unit/volume,
    // connectedness, nondegenerate pairing. Violations are data, not errors.
    std::vector<std::string> validate() const;

    // Builder used by builtins and the file loader; validates unless deferred.
    static PDAlgebra make(int dimension, std::vector<std::string> ids, std::vector<int> degrees,
                          std::string unit_id, std::string volume_id,
                          std::vector<std::tuple<int, int, std::vector<std::pair<int, Rational>>>> products,
                          bool validate_now = true);

    // JSON serialization per the documented schema.
    void save(std::ostream& os) const;
    static PDAlgebra load(std::istream& is);
    void save_file(const std::string& path) const;
    static PDAlgebra load_file(const std::string& path);

    bool same_as(const PDAlgebra& o) const;

  private:
    int dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<int> degrees_;
    int unit_ = -1;
    int volume_ = -1;
    // products_[i][j] = list of (k, c) meaning e_i e_j = sum c e_k
    std::vector<std::vector<std::vector<std::pair<int, Rational>>>> products_;
};

// The inverse of the Poincare pairing, Delta = sum g^{ij} e_i (x) e_j.
struct DiagonalClass {
    std::vector<std::tuple<int, int, Rational>> terms;
};

// Throws SingularPairing when the pairing matrix is not invertible.
DiagonalClass diagonal(const PDAlgebra& a);

// Product of the two legs of Delta; equals chi(A) * volume.
std::vector<Rational> euler_class(const PDAlgebra& a);

// Builtin cohomology rings: "S^D" (param D via name like "S^2", "S^3"...),
// "T^2", "Sigma_g" (g >= 2, e.g. "Sigma_2"), "CP^2", "S^axS^b" (e.g. "S^2xS^3").
PDAlgebra builtin(const std::string& name);

} // namespace confgc
