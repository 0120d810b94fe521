#ifndef TOBRA_LINALG_HPP
#define TOBRA_LINALG_HPP

#include <cmath>
#include <vector>

#include "error.hpp"

namespace tobra {

// Small dense double matrix, row-major. Everything here is sized by the
// number of branes or factor spaces, so O(n^3) with n <= ~30 is fine.
class MatD {
public:
    MatD() = default;
    MatD(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, 0.0) {}

    static MatD identity(int n) {
        MatD m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& at(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    double at(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

private:
    int rows_{0};
    int cols_{0};
    std::vector<double> data_;
};

struct LuDecomposition {
    MatD lu;
    std::vector<int> perm;
    double det{1.0};
    bool singular{false};
};

inline LuDecomposition lu_factor(const MatD& a, double pivot_tol = 0.0) {
    const int n = a.rows();
    LuDecomposition f;
    f.lu = a;
    f.perm.resize(n);
    for (int i = 0; i < n; ++i) f.perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(f.lu.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(f.lu.at(r, col));
            if (v > best) { best = v; pivot = r; }
        }
        if (best <= pivot_tol) { f.singular = true; f.det = 0.0; return f; }
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(f.lu.at(pivot, j), f.lu.at(col, j));
            std::swap(f.perm[pivot], f.perm[col]);
            f.det = -f.det;
        }
        f.det *= f.lu.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            double m = f.lu.at(r, col) / f.lu.at(col, col);
            f.lu.at(r, col) = m;
            for (int j = col + 1; j < n; ++j)
                f.lu.at(r, j) -= m * f.lu.at(col, j);
        }
    }
    return f;
}

inline std::vector<double> lu_solve(const LuDecomposition& f, const std::vector<double>& b) {
    const int n = f.lu.rows();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu.at(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu.at(i, j) * x[j];
        x[i] /= f.lu.at(i, i);
    }
    return x;
}

inline std::vector<double> solve_linear(const MatD& a, const std::vector<double>& b) {
    LuDecomposition f = lu_factor(a);
    if (f.singular) fail(ErrorCode::degenerate, "singular linear system");
    return lu_solve(f, b);
}

inline double determinant(const MatD& a) { return lu_factor(a).det; }

inline MatD inverse(const MatD& a) {
    const int n = a.rows();
    LuDecomposition f = lu_factor(a);
    if (f.singular) fail(ErrorCode::degenerate, "singular matrix has no inverse");
    MatD inv(n, n);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        std::vector<double> col = lu_solve(f, e);
        e[j] = 0.0;
        for (int i = 0; i < n; ++i) inv.at(i, j) = col[i];
    }
    return inv;
}

// Cholesky success doubles as the positive-definiteness test used by the
// admissibility and existence checks.
inline bool cholesky_spd(const MatD& a) {
    const int n = a.rows();
    MatD l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a.at(i, j);
            for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (s <= 0.0) return false;
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    return true;
}

// Least squares min |Ax-b| via Householder QR, for polynomial fits of the
// Toda-derived samples. A is tall (rows >= cols).
inline std::vector<double> least_squares(MatD a, std::vector<double> b) {
    const int m = a.rows();
    const int n = a.cols();
    if (m < n) fail(ErrorCode::invalid_input, "least_squares needs rows >= cols");
    for (int k = 0; k < n; ++k) {
        double norm = 0.0;
        for (int i = k; i < m; ++i) norm += a.at(i, k) * a.at(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) fail(ErrorCode::degenerate, "rank-deficient least squares");
        double alpha = a.at(k, k) > 0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        v[k] = a.at(k, k) - alpha;
        for (int i = k + 1; i < m; ++i) v[i] = a.at(i, k);
        double vtv = 0.0;
        for (int i = k; i < m; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        for (int j = k; j < n; ++j) {
            double dot = 0.0;
            for (int i = k; i < m; ++i) dot += v[i] * a.at(i, j);
            double f = 2.0 * dot / vtv;
            for (int i = k; i < m; ++i) a.at(i, j) -= f * v[i];
        }
        double dotb = 0.0;
        for (int i = k; i < m; ++i) dotb += v[i] * b[i];
        double fb = 2.0 * dotb / vtv;
        for (int i = k; i < m; ++i) b[i] -= fb * v[i];
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a.at(i, j) * x[j];
        x[i] = s / a.at(i, i);
    }
    return x;
}

} // namespace tobra

#endif
