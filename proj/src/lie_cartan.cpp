#include "lie_cartan.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

namespace tobra {

namespace {

constexpr int kMaxCatalogRank = 8;

std::mutex& catalog_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, RatMatrix>& custom_catalog() {
    static std::map<std::string, RatMatrix> entries;
    return entries;
}

std::string null_direction_str(const std::vector<Rational>& v) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i].str();
    }
    os << ")";
    return os.str();
}

} // namespace

std::optional<AlgebraTag> parse_algebra_tag(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace((unsigned char)c) && c != '_') t.push_back(c);
    if (t.size() < 2) return std::nullopt;
    char fam = char(std::toupper((unsigned char)t[0]));
    AlgebraFamily family;
    if (fam == 'A') family = AlgebraFamily::A;
    else if (fam == 'C') family = AlgebraFamily::C;
    else return std::nullopt;
    for (size_t i = 1; i < t.size(); ++i)
        if (!std::isdigit((unsigned char)t[i])) return std::nullopt;
    int rank = std::stoi(t.substr(1));
    if (rank < 1) return std::nullopt;
    return AlgebraTag{family, rank};
}

QuasiCartan cartan_matrix(AlgebraFamily family, int rank) {
    if (rank < 1)
        fail(ErrorCode::invalid_input, "cartan_matrix: rank must be >= 1");
    RatMatrix m(rank, rank);
    for (int i = 0; i < rank; ++i) {
        m.at(i, i) = Rational(2);
        if (i + 1 < rank) m.at(i, i + 1) = Rational(-1);
        if (i > 0) m.at(i, i - 1) = Rational(-1);
    }
    if (family == AlgebraFamily::C && rank >= 2)
        m.at(0, 1) = Rational(-2); // index 0 is the row with the -2 entry
    QuasiCartan q;
    q.size = rank;
    q.entries = std::move(m);
    // C1 coincides with A1; keep the canonical name.
    AlgebraFamily named = (family == AlgebraFamily::C && rank == 1) ? AlgebraFamily::A : family;
    q.algebra_tag = AlgebraTag{named, rank}.str();
    return q;
}

QuasiCartan cartan_matrix(const AlgebraTag& tag) {
    return cartan_matrix(tag.family, tag.rank);
}

RatMatrix inverse_cartan(const QuasiCartan& a) {
    RatInverseResult res = rat_inverse(a.entries);
    if (!res.inverse)
        fail(ErrorCode::degenerate,
             "quasi-Cartan matrix is degenerate; null direction " +
                 null_direction_str(res.null_direction));
    return *res.inverse;
}

DegreeVector polynomial_degrees(const QuasiCartan& a) {
    RatMatrix inv = inverse_cartan(a);
    DegreeVector deg;
    deg.n.resize(a.size);
    deg.all_positive_integers = true;
    for (int s = 0; s < a.size; ++s) {
        Rational row_sum(0);
        for (int t = 0; t < a.size; ++t) row_sum += inv.at(s, t);
        deg.n[s] = Rational(2) * row_sum;
        if (!deg.n[s].is_integer() || !deg.n[s].is_positive())
            deg.all_positive_integers = false;
    }
    return deg;
}

QuasiCartan make_quasi_cartan(const RatMatrix& m) {
    ValidationReport rep = validate_quasi_cartan(m);
    if (!rep.diagonal_violations.empty())
        fail(ErrorCode::invalid_input, "quasi-Cartan matrix must have all diagonal entries equal to 2");
    if (rep.degenerate)
        fail(ErrorCode::degenerate,
             "quasi-Cartan matrix is degenerate; null direction " +
                 null_direction_str(rep.null_direction));
    QuasiCartan q;
    q.size = m.rows();
    q.entries = m;
    q.algebra_tag = rep.catalog_match;
    return q;
}

void register_custom_algebra(const std::string& tag, const RatMatrix& m) {
    if (m.rows() != m.cols())
        fail(ErrorCode::invalid_input, "custom catalog entry must be square");
    std::lock_guard<std::mutex> lock(catalog_mutex());
    custom_catalog()[tag] = m;
}

namespace {

bool equal_submatrix(const RatMatrix& m, const std::vector<int>& idx, const RatMatrix& ref) {
    if ((int)idx.size() != ref.rows()) return false;
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j)
            if (m.at(idx[i], idx[j]) != ref.at(int(i), int(j))) return false;
    return true;
}

// Match one connected component (indices in ascending order) against the
// simple-algebra catalog plus any registered custom entries.
std::optional<std::string> match_component(const RatMatrix& m, const std::vector<int>& idx) {
    const int r = int(idx.size());
    if (r <= kMaxCatalogRank) {
        if (equal_submatrix(m, idx, cartan_matrix(AlgebraFamily::A, r).entries))
            return AlgebraTag{AlgebraFamily::A, r}.str();
        if (r >= 2 && equal_submatrix(m, idx, cartan_matrix(AlgebraFamily::C, r).entries))
            return AlgebraTag{AlgebraFamily::C, r}.str();
    }
    std::lock_guard<std::mutex> lock(catalog_mutex());
    for (const auto& [tag, ref] : custom_catalog())
        if (equal_submatrix(m, idx, ref)) return tag;
    return std::nullopt;
}

} // namespace

ValidationReport validate_quasi_cartan(const RatMatrix& m) {
    if (m.rows() != m.cols())
        fail(ErrorCode::invalid_input, "validate_quasi_cartan: matrix must be square");
    const int n = m.rows();
    ValidationReport rep;
    for (int i = 0; i < n; ++i)
        if (m.at(i, i) != Rational(2)) rep.diagonal_violations.push_back(i);

    RatInverseResult inv = rat_inverse(m);
    if (!inv.inverse) {
        rep.degenerate = true;
        rep.null_direction = inv.null_direction;
    }
    rep.valid = rep.diagonal_violations.empty() && !rep.degenerate;

    if (rep.valid) {
        // Connected components of the off-diagonal support graph.
        std::vector<int> comp(n, -1);
        int ncomp = 0;
        for (int i = 0; i < n; ++i) {
            if (comp[i] >= 0) continue;
            std::vector<int> stack{i};
            comp[i] = ncomp;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (int v = 0; v < n; ++v) {
                    if (v == u || comp[v] >= 0) continue;
                    if (!m.at(u, v).is_zero() || !m.at(v, u).is_zero()) {
                        comp[v] = ncomp;
                        stack.push_back(v);
                    }
                }
            }
            ++ncomp;
        }
        std::vector<std::string> names;
        bool all_matched = true;
        for (int c = 0; c < ncomp && all_matched; ++c) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i)
                if (comp[i] == c) idx.push_back(i);
            std::optional<std::string> name = match_component(m, idx);
            if (!name) all_matched = false;
            else names.push_back(*name);
        }
        if (all_matched && !names.empty()) {
            std::string joined = names[0];
            for (size_t i = 1; i < names.size(); ++i) joined += "+" + names[i];
            rep.catalog_match = joined;
        }
    }
    return rep;
}

} // namespace tobra
