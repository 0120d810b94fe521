#ifndef TOBRA_POLY_HPP
#define TOBRA_POLY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace tobra {

// Polynomial in z with double coefficients, coef[k] multiplying z^k.
using Poly = std::vector<double>;

inline double poly_eval(const Poly& p, double z) {
    double acc = 0.0;
    for (size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
    return acc;
}

inline Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return Poly{0.0};
    Poly d(p.size() - 1);
    for (size_t k = 1; k < p.size(); ++k) d[k - 1] = double(k) * p[k];
    return d;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) r[k] += b[k];
    return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) r[k] -= b[k];
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return Poly{0.0};
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline Poly poly_scale(Poly p, double c) {
    for (double& v : p) v *= c;
    return p;
}

inline Poly poly_pow(const Poly& p, int e) {
    Poly r{1.0};
    for (int k = 0; k < e; ++k) r = poly_mul(r, p);
    return r;
}

} // namespace tobra

#endif
