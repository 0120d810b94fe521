#ifndef TOBRA_LIE_CARTAN_HPP
#define TOBRA_LIE_CARTAN_HPP

#include <optional>
#include <string>
#include <vector>

#include "rational.hpp"

namespace tobra {

// Quasi-Cartan matrix: square, rational entries, diagonal pinned to 2.
// Carries a catalog tag when it equals a known Cartan matrix exactly.
struct QuasiCartan {
    int size{0};
    RatMatrix entries;
    std::optional<std::string> algebra_tag;

    const Rational& at(int i, int j) const { return entries.at(i, j); }
};

struct DegreeVector {
    std::vector<Rational> n;
    // True when every n_s is a positive integer, i.e. the polynomial
    // ansatz applies to this matrix.
    bool all_positive_integers{false};

    std::vector<int> as_ints() const {
        std::vector<int> out;
        out.reserve(n.size());
        for (const Rational& r : n) out.push_back(int(r.num()));
        return out;
    }
};

enum class AlgebraFamily { A, C };

struct AlgebraTag {
    AlgebraFamily family;
    int rank;

    std::string str() const {
        return (family == AlgebraFamily::A ? "A" : "C") + std::to_string(rank);
    }
};

// Parses "A3", "A_3", "c2" style labels.
std::optional<AlgebraTag> parse_algebra_tag(const std::string& text);

// Cartan matrix of A_rank (tridiagonal 2/-1) or C_rank (row 0 carries the
// -2 entry, per the index ordering used throughout).
QuasiCartan cartan_matrix(AlgebraFamily family, int rank);
QuasiCartan cartan_matrix(const AlgebraTag& tag);

// Exact rational inverse; on a singular input throws a degeneracy error
// naming a null direction.
RatMatrix inverse_cartan(const QuasiCartan& a);

// n_s = 2 * (row sum of the inverse matrix).
DegreeVector polynomial_degrees(const QuasiCartan& a);

struct ValidationReport {
    bool valid{false};
    std::vector<int> diagonal_violations; // indices with entry != 2
    bool degenerate{false};
    std::vector<Rational> null_direction; // set when degenerate
    std::optional<std::string> catalog_match;
};

// Checks the all-2 diagonal and nondegeneracy, and looks for an exact
// catalog match (componentwise over the connectivity graph, so direct
// sums like A1+A1 are recognized).
ValidationReport validate_quasi_cartan(const RatMatrix& m);

// Custom catalog entries (e.g. B/D series) participate in validation
// matching but carry no polynomiality guarantee.
void register_custom_algebra(const std::string& tag, const RatMatrix& m);

QuasiCartan make_quasi_cartan(const RatMatrix& m);

} // namespace tobra

#endif
