#ifndef TOBRA_RATIONAL_HPP
#define TOBRA_RATIONAL_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace tobra {

// Exact rational over int64 with overflow detection. Catalog matrices, their
// inverses and the degree vectors must be certified exactly, so no floating
// point is allowed anywhere in this layer.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    bool is_positive() const { return num_ > 0; }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make_checked(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                            i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make_checked(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                            i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make_checked(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) fail(ErrorCode::domain_error, "rational division by zero");
        return make_checked(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    Rational& operator+=(const Rational& b) { *this = *this + b; return *this; }
    Rational& operator-=(const Rational& b) { *this = *this - b; return *this; }
    Rational& operator*=(const Rational& b) { *this = *this * b; return *this; }
    Rational& operator/=(const Rational& b) { *this = *this / b; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }

private:
    using i128 = __int128;

    static Rational make_checked(i128 n, i128 d) {
        if (d == 0) fail(ErrorCode::domain_error, "rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        const i128 lim = i128(INT64_MAX);
        if (n > lim || n < -lim || d > lim)
            fail(ErrorCode::internal, "rational arithmetic overflow");
        Rational r;
        r.num_ = (long long)n;
        r.den_ = (long long)d;
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        Rational r = make_checked(num_, den_);
        num_ = r.num_;
        den_ = r.den_;
    }

    long long num_{0};
    long long den_{1};
};

// Best rational approximation p/q of x with q <= max_den (continued
// fractions); returns nothing when even the best one misses by more than tol.
inline std::optional<Rational> snap_to_rational(double x, long long max_den, double tol) {
    if (!(x == x)) return std::nullopt;
    const bool negative = x < 0.0;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = negative ? -x : x;
    for (int it = 0; it < 64; ++it) {
        double fa = std::floor(v);
        if (fa > 9.0e18) break;
        long long a = (long long)fa;
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > max_den || q2 < 0 || p2 < 0) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double rem = v - double(a);
        if (rem < 1e-15 * (v + 1.0)) break;
        v = 1.0 / rem;
    }
    if (q1 <= 0) return std::nullopt;
    Rational cand(negative ? -p1 : p1, q1);
    if (std::abs(cand.to_double() - x) <= tol) return cand;
    return std::nullopt;
}

// Dense matrix of rationals, row-major.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Rational(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& at(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    const Rational& at(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
        if (a.cols_ != b.rows_) fail(ErrorCode::invalid_input, "matrix shape mismatch");
        RatMatrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (int j = 0; j < b.cols_; ++j)
                    c.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        return c;
    }

    friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    Rational det() const {
        if (rows_ != cols_) fail(ErrorCode::invalid_input, "determinant of non-square matrix");
        RatMatrix m = *this;
        Rational d(1);
        for (int col = 0; col < cols_; ++col) {
            int pivot = -1;
            for (int r = col; r < rows_; ++r)
                if (!m.at(r, col).is_zero()) { pivot = r; break; }
            if (pivot < 0) return Rational(0);
            if (pivot != col) {
                for (int j = 0; j < cols_; ++j) std::swap(m.at(pivot, j), m.at(col, j));
                d = -d;
            }
            d *= m.at(col, col);
            for (int r = col + 1; r < rows_; ++r) {
                if (m.at(r, col).is_zero()) continue;
                Rational f = m.at(r, col) / m.at(col, col);
                for (int j = col; j < cols_; ++j)
                    m.at(r, j) -= f * m.at(col, j);
            }
        }
        return d;
    }

private:
    int rows_{0};
    int cols_{0};
    std::vector<Rational> data_;
};

// Exact inverse (Gauss-Jordan). On a singular matrix reports a null
// direction so callers can name the degeneracy.
struct RatInverseResult {
    std::optional<RatMatrix> inverse;
    std::vector<Rational> null_direction; // nonempty iff singular
};

inline RatInverseResult rat_inverse(const RatMatrix& input) {
    if (input.rows() != input.cols())
        fail(ErrorCode::invalid_input, "inverse of non-square matrix");
    const int n = input.rows();
    RatMatrix m = input;
    RatMatrix inv = RatMatrix::identity(n);
    std::vector<int> pivot_col_of_row(n, -1);
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int pivot = -1;
        for (int r = rank; r < n; ++r)
            if (!m.at(r, col).is_zero()) { pivot = r; break; }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int j = 0; j < n; ++j) {
                std::swap(m.at(pivot, j), m.at(rank, j));
                std::swap(inv.at(pivot, j), inv.at(rank, j));
            }
        Rational p = m.at(rank, col);
        for (int j = 0; j < n; ++j) { m.at(rank, j) /= p; inv.at(rank, j) /= p; }
        for (int r = 0; r < n; ++r) {
            if (r == rank || m.at(r, col).is_zero()) continue;
            Rational f = m.at(r, col);
            for (int j = 0; j < n; ++j) {
                m.at(r, j) -= f * m.at(rank, j);
                inv.at(r, j) -= f * inv.at(rank, j);
            }
        }
        pivot_col_of_row[rank] = col;
        ++rank;
    }
    RatInverseResult res;
    if (rank == n) {
        res.inverse = std::move(inv);
        return res;
    }
    // Free column -> null vector from the reduced row echelon form.
    std::vector<bool> is_pivot(n, false);
    for (int r = 0; r < rank; ++r) is_pivot[pivot_col_of_row[r]] = true;
    int free_col = 0;
    while (free_col < n && is_pivot[free_col]) ++free_col;
    std::vector<Rational> null_vec(n);
    null_vec[free_col] = Rational(1);
    for (int r = 0; r < rank; ++r)
        null_vec[pivot_col_of_row[r]] = -m.at(r, free_col);
    res.null_direction = std::move(null_vec);
    return res;
}

} // namespace tobra

#endif
