#include "toda_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "linalg.hpp"

namespace tobra {

namespace {

double log_vandermonde_sq(const std::vector<double>& w) {
    double acc = 0.0;
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = i + 1; j < w.size(); ++j)
            acc += 2.0 * std::log(std::abs(w[i] - w[j]));
    return acc;
}

// Signed log-sum-exp with max subtraction. Returns log of the sum; the sum
// must come out positive.
double signed_lse(const std::vector<double>& log_mag, const std::vector<double>& sign,
                  bool* ok) {
    double mx = -1e308;
    for (double lm : log_mag) mx = std::max(mx, lm);
    double acc = 0.0;
    for (size_t i = 0; i < log_mag.size(); ++i) acc += sign[i] * std::exp(log_mag[i] - mx);
    if (acc <= 0.0) {
        *ok = false;
        return 0.0;
    }
    *ok = true;
    return mx + std::log(acc);
}

// All size-k subsets of {0..n-1} in lexicographic order.
void enumerate_subsets(int n, int k, const std::function<void(const std::vector<int>&)>& emit) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        emit(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// log tau_s(u) for the chain built over log|v| with signs.
double log_tau(const TodaChainSolution& sol, int s, double u, bool* ok) {
    const auto& ts = sol.terms[s - 1];
    std::vector<double> lm(ts.size()), sg(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        lm[i] = ts[i].log_mag + ts[i].sum_w * u;
        sg[i] = ts[i].sign;
    }
    return signed_lse(lm, sg, ok);
}

void build_terms(TodaChainSolution& sol) {
    const int np = sol.m + 1;
    sol.terms.assign(sol.m, {});
    for (int s = 1; s <= sol.m; ++s) {
        auto& bucket = sol.terms[s - 1];
        enumerate_subsets(np, s, [&](const std::vector<int>& J) {
            TodaChainSolution::Term t{0.0, 1.0, 0.0};
            for (int r : J) {
                t.log_mag += std::log(std::abs(sol.v[r]));
                if (sol.v[r] < 0.0) t.sign = -t.sign;
                t.sum_w += sol.w[r];
            }
            for (size_t a = 0; a < J.size(); ++a)
                for (size_t b = a + 1; b < J.size(); ++b)
                    t.log_mag += 2.0 * std::log(std::abs(sol.w[J[a]] - sol.w[J[b]]));
            bucket.push_back(t);
        });
    }
}

// Inverse A_m Cartan matrix entry, min(s,s')[m+1-max(s,s')]/(m+1) with
// 1-based s.
double a_inverse_entry(int m, int s, int t) {
    return double(std::min(s, t)) * double(m + 1 - std::max(s, t)) / double(m + 1);
}

std::vector<double> newton_generic(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    std::vector<double> x, double tol, int max_iters, bool* converged) {
    const int n = int(x.size());
    auto norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double t : v) m = std::max(m, std::abs(t));
        return m;
    };
    std::vector<double> r = f(x);
    double rn = norm(r);
    *converged = rn <= tol;
    for (int it = 0; it < max_iters && rn > tol; ++it) {
        MatD jac(n, n);
        for (int j = 0; j < n; ++j) {
            const double step = 1e-7 * std::max(1.0, std::abs(x[j]));
            std::vector<double> xp = x, xm = x;
            xp[j] += step;
            xm[j] -= step;
            std::vector<double> rp = f(xp), rm = f(xm);
            for (int i = 0; i < n; ++i) jac.at(i, j) = (rp[i] - rm[i]) / (2.0 * step);
        }
        LuDecomposition lu = lu_factor(jac, 1e-300);
        if (lu.singular) break;
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -r[i];
        std::vector<double> dx = lu_solve(lu, rhs);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt) {
            std::vector<double> xt(n);
            for (int i = 0; i < n; ++i) xt[i] = x[i] + alpha * dx[i];
            std::vector<double> rt = f(xt);
            double rtn = norm(rt);
            if (rtn < rn) {
                x = std::move(xt);
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    *converged = rn <= tol;
    return x;
}

} // namespace

std::vector<double> black_hole_spectrum(int m, double mu_bar) {
    if (mu_bar <= 0.0) fail(ErrorCode::invalid_input, "mu_bar must be positive");
    std::vector<double> w(m + 1);
    for (int j = 1; j <= m + 1; ++j) w[j - 1] = double(2 * j - m - 2) * mu_bar;
    return w;
}

TodaChainSolution make_toda_solution(int m, const std::vector<double>& w,
                                     const std::vector<double>& B) {
    if (m < 1) fail(ErrorCode::invalid_input, "chain length m must be >= 1");
    if ((int)w.size() != m + 1)
        fail(ErrorCode::invalid_input, "spectrum must have m + 1 entries");
    if ((int)B.size() != m) fail(ErrorCode::invalid_input, "B must have m entries");
    double wscale = 0.0, wsum = 0.0;
    for (double wr : w) {
        wscale = std::max(wscale, std::abs(wr));
        wsum += wr;
    }
    if (std::abs(wsum) > 1e-12 * std::max(1.0, wscale))
        fail(ErrorCode::invalid_input, "spectrum must sum to zero");
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = i + 1; j < w.size(); ++j)
            if (std::abs(w[i] - w[j]) <= 1e-9 * std::max(1.0, wscale))
                fail(ErrorCode::domain_error,
                     "degenerate spectrum (coinciding w_r) is outside the Vandermonde family");
    for (double b : B)
        if (b <= 0.0)
            fail(ErrorCode::domain_error,
                 "B_s <= 0 requires complex or degenerate spectral data, not supported");

    TodaChainSolution sol;
    sol.m = m;
    sol.w = w;
    sol.B = B;
    sol.log_c.resize(m);
    for (int s = 1; s <= m; ++s) {
        double lc = 0.0;
        for (int t = 1; t <= m; ++t) lc -= a_inverse_entry(m, s, t) * std::log(B[t - 1]);
        sol.log_c[s - 1] = lc;
    }

    // Unknowns x_r = log v_r. Equation 0 pins prod v = Delta^-2(w); the
    // rest impose tau_s(0) = C_s, i.e. q^s(0) = 0.
    const double log_delta_sq = log_vandermonde_sq(w);
    auto equations = [&](const std::vector<double>& x) {
        TodaChainSolution trial = sol;
        trial.v.resize(m + 1);
        for (int r = 0; r <= m; ++r) trial.v[r] = std::exp(x[r]);
        build_terms(trial);
        std::vector<double> res(m + 1);
        double sum_x = 0.0;
        for (double xr : x) sum_x += xr;
        res[0] = sum_x + log_delta_sq;
        for (int s = 1; s <= m; ++s) {
            bool ok = true;
            res[s] = log_tau(trial, s, 0.0, &ok) - sol.log_c[s - 1];
            if (!ok) res[s] = 1e6;
        }
        return res;
    };
    // The symmetric point v_1 = ... = v_{m+1} is a Jacobian singularity
    // (it is the existence boundary), so every start breaks the symmetry
    // with a ramp.
    const double base = -log_delta_sq / double(m + 1);
    bool converged = false;
    std::vector<double> x;
    for (double ramp : {0.2, 0.7, 1.5, 3.0, -0.7}) {
        std::vector<double> x0(m + 1);
        for (int r = 0; r <= m; ++r) x0[r] = base + ramp * (double(r) - 0.5 * m);
        x = newton_generic(equations, x0, 1e-12, 120, &converged);
        if (converged) break;
    }
    if (!converged)
        fail(ErrorCode::no_solution,
             "calibration of spectral coefficients v_r did not converge; the couplings"
             " may be infeasible for this spectrum (energy bound)");
    sol.v.resize(m + 1);
    for (int r = 0; r <= m; ++r) sol.v[r] = std::exp(x[r]);
    build_terms(sol);
    return sol;
}

TodaChainSolution toda_solution_from_v(int m, std::vector<double> v,
                                       const std::vector<double>& w) {
    if (m < 1) fail(ErrorCode::invalid_input, "chain length m must be >= 1");
    if ((int)v.size() != m + 1 || (int)w.size() != m + 1)
        fail(ErrorCode::invalid_input, "v and w must have m + 1 entries");
    for (double vr : v)
        if (!(vr > 0.0)) fail(ErrorCode::invalid_input, "spectral coefficients must be positive");
    double wscale = 0.0, wsum = 0.0;
    for (double wr : w) {
        wscale = std::max(wscale, std::abs(wr));
        wsum += wr;
    }
    if (std::abs(wsum) > 1e-12 * std::max(1.0, wscale))
        fail(ErrorCode::invalid_input, "spectrum must sum to zero");
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = i + 1; j < w.size(); ++j)
            if (std::abs(w[i] - w[j]) <= 1e-9 * std::max(1.0, wscale))
                fail(ErrorCode::domain_error,
                     "degenerate spectrum (coinciding w_r) is outside the Vandermonde family");

    // Rescale onto the product constraint, then read B off tau_s(0).
    const double log_delta_sq = log_vandermonde_sq(w);
    double log_prod = 0.0;
    for (double vr : v) log_prod += std::log(vr);
    const double shift = (-log_delta_sq - log_prod) / double(m + 1);
    for (double& vr : v) vr = std::exp(std::log(vr) + shift);

    TodaChainSolution sol;
    sol.m = m;
    sol.v = std::move(v);
    sol.w = w;
    build_terms(sol);
    std::vector<double> log_tau0(m);
    for (int s = 1; s <= m; ++s) {
        bool ok = true;
        log_tau0[s - 1] = log_tau(sol, s, 0.0, &ok);
        if (!ok) fail(ErrorCode::domain_error, "tau_s(0) <= 0 for the given coefficients");
    }
    QuasiCartan a = cartan_matrix(AlgebraFamily::A, m);
    sol.B.assign(m, 0.0);
    for (int s = 0; s < m; ++s) {
        double log_b = 0.0;
        for (int t = 0; t < m; ++t) log_b -= a.at(s, t).to_double() * log_tau0[t];
        sol.B[s] = std::exp(log_b);
    }
    sol.log_c = log_tau0; // q^s(0) = 0 by construction
    return sol;
}

TodaChainSolution black_hole_toda_equal_v(int m, double mu_bar) {
    std::vector<double> w = black_hole_spectrum(m, mu_bar);
    return toda_solution_from_v(m, std::vector<double>(m + 1, 1.0), w);
}

TodaChainSolution black_hole_toda(int m, double mu_bar, const std::vector<double>& B) {
    return make_toda_solution(m, black_hole_spectrum(m, mu_bar), B);
}

TodaChainSolution toda_solution_from_parameters(int m, const std::vector<double>& v,
                                                const std::vector<double>& w,
                                                const std::vector<double>& B) {
    if ((int)v.size() != m + 1 || (int)w.size() != m + 1 || (int)B.size() != m)
        fail(ErrorCode::invalid_input, "parameter lengths do not match the chain length");
    for (double vr : v)
        if (vr == 0.0) fail(ErrorCode::invalid_input, "all v_r must be nonzero");
    TodaChainSolution sol;
    sol.m = m;
    sol.v = v;
    sol.w = w;
    sol.B = B;
    sol.log_c.assign(m, 0.0);
    for (int s = 1; s <= m; ++s) {
        double lc = 0.0;
        for (int t = 1; t <= m; ++t)
            lc -= a_inverse_entry(m, s, t) * std::log(std::abs(B[t - 1]));
        sol.log_c[s - 1] = lc;
    }
    build_terms(sol);
    return sol;
}

std::vector<double> anderson_q(const TodaChainSolution& sol, double u) {
    std::vector<double> q(sol.m);
    for (int s = 1; s <= sol.m; ++s) {
        bool ok = true;
        const double lt = log_tau(sol, s, u, &ok);
        if (!ok) {
            std::ostringstream msg;
            msg << "tau_" << s << "(u) <= 0 at u = " << u << "; log undefined";
            fail(ErrorCode::domain_error, msg.str());
        }
        q[s - 1] = sol.log_c[s - 1] - lt;
    }
    return q;
}

TodaEnergy toda_energy(const TodaChainSolution& sol, double h) {
    double sum_w2 = 0.0;
    for (double wr : sol.w) sum_w2 += wr * wr;
    return TodaEnergy{0.5 * sum_w2, 0.25 * h * sum_w2};
}

HFromToda h_from_toda(const TodaChainSolution& sol, const std::vector<int>& n,
                      double mu_bar, const std::vector<double>& u_grid) {
    if ((int)n.size() != sol.m)
        fail(ErrorCode::invalid_input, "degree vector length must match the chain length");
    HFromToda out;
    out.u = u_grid;
    out.z.resize(u_grid.size());
    out.H.assign(sol.m, std::vector<double>(u_grid.size()));
    std::vector<double> q0 = anderson_q(sol, 0.0);
    for (int s = 0; s < sol.m; ++s)
        if (std::abs(std::exp(-q0[s]) - 1.0) > 1e-9)
            fail(ErrorCode::internal,
                 "normalization error: H_s(0) deviates from 1 beyond 1e-9");
    for (size_t i = 0; i < u_grid.size(); ++i) {
        const double u = u_grid[i];
        out.z[i] = (1.0 - std::exp(-2.0 * mu_bar * u)) / (2.0 * mu_bar);
        std::vector<double> q = anderson_q(sol, u);
        for (int s = 0; s < sol.m; ++s)
            out.H[s][i] = std::exp(-q[s] - double(n[s]) * mu_bar * u);
    }
    return out;
}

PolyFit fit_polynomial(const std::vector<double>& z, const std::vector<double>& y, int degree) {
    if (z.size() != y.size() || (int)z.size() < degree + 1)
        fail(ErrorCode::invalid_input, "not enough samples for the requested degree");
    MatD a(int(z.size()), degree + 1);
    for (size_t i = 0; i < z.size(); ++i) {
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            a.at(int(i), k) = p;
            p *= z[i];
        }
    }
    PolyFit fit;
    fit.coef = least_squares(a, y);
    fit.max_error = 0.0;
    for (size_t i = 0; i < z.size(); ++i)
        fit.max_error = std::max(fit.max_error, std::abs(poly_eval(fit.coef, z[i]) - y[i]));
    return fit;
}

std::vector<double> FoldMap::expand_bbar(const std::vector<double>& bbar_c) const {
    if ((int)bbar_c.size() != m + 1)
        fail(ErrorCode::invalid_input, "C-side Bbar must have m + 1 entries");
    std::vector<double> out(a_rank);
    for (int j = 0; j < a_rank; ++j) out[j] = bbar_c[from_a[j]];
    return out;
}

std::vector<ModuliPolynomial> FoldMap::extract_symmetric(
    const std::vector<ModuliPolynomial>& h_a, double tol) const {
    if ((int)h_a.size() != a_rank)
        fail(ErrorCode::invalid_input, "A-side solution has the wrong size");
    for (int k = 1; k <= m; ++k) {
        const ModuliPolynomial& left = h_a[m - k];
        const ModuliPolynomial& right = h_a[m + k];
        if (left.p.size() != right.p.size())
            fail(ErrorCode::domain_error, "mirror moduli have different degrees");
        for (size_t c = 0; c < left.p.size(); ++c)
            if (std::abs(left.p[c] - right.p[c]) > tol * std::max(1.0, std::abs(right.p[c])))
                fail(ErrorCode::domain_error,
                     "solution is not mirror symmetric; folding does not apply");
    }
    std::vector<ModuliPolynomial> out(m + 1);
    for (int k = 0; k <= m; ++k) out[k] = h_a[m + k];
    return out;
}

FoldMap fold_c_to_a(int m) {
    if (m < 1) fail(ErrorCode::invalid_input, "fold requires m >= 1");
    FoldMap map;
    map.m = m;
    map.a_rank = 2 * m + 1;
    map.to_a.resize(m + 1);
    map.from_a.resize(map.a_rank);
    map.to_a[0] = {m};
    for (int k = 1; k <= m; ++k) map.to_a[k] = {m - k, m + k};
    for (int j = 0; j < map.a_rank; ++j) map.from_a[j] = std::abs(j - m);

    // Rebuild the folded matrix from A_{2m+1}: row k reads off the
    // representative node m+k, columns sum over each mirror orbit.
    QuasiCartan a_big = cartan_matrix(AlgebraFamily::A, map.a_rank);
    RatMatrix folded(m + 1, m + 1);
    for (int k = 0; k <= m; ++k)
        for (int kp = 0; kp <= m; ++kp) {
            Rational acc(0);
            for (int j : map.to_a[kp]) acc += a_big.at(m + k, j);
            folded.at(k, kp) = acc;
        }
    map.folded = make_quasi_cartan(folded);
    return map;
}

namespace {

struct RhsContext {
    const ModuliProblem* problem;
    std::vector<double> a_dbl; // row-major quasi-Cartan as doubles
};

// State y = (H_1..H_m, H_1'..H_m').
void moduli_rhs(const RhsContext& ctx, double z, const std::vector<double>& y,
                std::vector<double>* dy, bool* positivity_ok) {
    const int m = ctx.problem->size();
    const double f = 1.0 - 2.0 * ctx.problem->mu * z;
    *positivity_ok = true;
    for (int s = 0; s < m; ++s)
        if (y[s] <= 0.0) *positivity_ok = false;
    if (!*positivity_ok) return;
    dy->assign(2 * m, 0.0);
    for (int s = 0; s < m; ++s) (*dy)[s] = y[m + s];
    for (int s = 0; s < m; ++s) {
        double prod = ctx.problem->Bbar[s];
        for (int t = 0; t < m; ++t)
            prod *= std::pow(y[t], -ctx.a_dbl[size_t(s) * m + t]);
        const double hs = y[s];
        const double vs = y[m + s];
        (*dy)[m + s] = (prod * hs + 2.0 * ctx.problem->mu * vs + f * vs * vs / hs) / f;
    }
}

// One Dormand-Prince RK45 step with embedded error estimate.
bool rk45_step(const RhsContext& ctx, double z, const std::vector<double>& y, double h,
               std::vector<double>* y_out, double* err_norm, const OdeOptions& opts,
               bool* positivity_ok) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const size_t n = y.size();
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp(n);
    auto eval = [&](double zz, const std::vector<double>& yy, std::vector<double>* out) {
        moduli_rhs(ctx, zz, yy, out, positivity_ok);
        return *positivity_ok;
    };
    if (!eval(z, y, &k1)) return false;
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    if (!eval(z + c2 * h, tmp, &k2)) return false;
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    if (!eval(z + c3 * h, tmp, &k3)) return false;
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    if (!eval(z + c4 * h, tmp, &k4)) return false;
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    if (!eval(z + c5 * h, tmp, &k5)) return false;
    for (size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    if (!eval(z + h, tmp, &k6)) return false;
    y_out->resize(n);
    for (size_t i = 0; i < n; ++i)
        (*y_out)[i] =
            y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    if (!eval(z + h, *y_out, &k7)) return false;
    double en = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
        const double scale =
            opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs((*y_out)[i]));
        en = std::max(en, std::abs(err) / scale);
    }
    *err_norm = en;
    return true;
}

} // namespace

OdeRun integrate_ode_at(const ModuliProblem& problem, const std::vector<double>& slopes,
                        const std::vector<double>& z_samples, const OdeOptions& opts) {
    const int m = problem.size();
    if ((int)slopes.size() != m)
        fail(ErrorCode::invalid_input, "slope vector length must match the brane count");
    if (z_samples.empty() || !std::is_sorted(z_samples.begin(), z_samples.end()))
        fail(ErrorCode::invalid_input, "sample points must be sorted and nonempty");
    const double z_end = z_samples.back();
    if (z_end >= problem.z_horizon())
        fail(ErrorCode::invalid_input, "z_end must stay below the horizon value 1/(2 mu)");
    for (double s : slopes)
        if (!std::isfinite(s)) fail(ErrorCode::invalid_input, "slopes must be finite");
    const int grid_points = int(z_samples.size());

    RhsContext ctx{&problem, {}};
    ctx.a_dbl.resize(size_t(m) * m);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) ctx.a_dbl[size_t(s) * m + t] = problem.A.at(s, t).to_double();

    OdeRun run;
    run.slopes = slopes;
    run.z = z_samples;
    run.H.assign(m, std::vector<double>(grid_points));
    run.dH.assign(m, std::vector<double>(grid_points));

    std::vector<double> y(2 * m);
    for (int s = 0; s < m; ++s) {
        y[s] = 1.0;
        y[m + s] = slopes[s];
    }
    double z = 0.0;
    double h = std::min(1e-4, std::max(z_end, 1e-12) / 16.0);
    int next_record = 0;
    auto record_up_to = [&](double z_now, const std::vector<double>& y_now) {
        while (next_record < grid_points && run.z[next_record] <= z_now + 1e-15) {
            for (int s = 0; s < m; ++s) {
                run.H[s][next_record] = y_now[s];
                run.dH[s][next_record] = y_now[m + s];
            }
            ++next_record;
        }
    };
    record_up_to(0.0, y);

    const double h_min = 1e-14 * std::max(1.0, z_end);
    while (z < z_end) {
        double h_try = std::min(h, z_end - z);
        // Land exactly on the next requested sample.
        if (next_record < grid_points && z + h_try > run.z[next_record])
            h_try = run.z[next_record] - z;
        if (h_try < h_min) {
            std::ostringstream msg;
            msg << "step size underflow near z = " << z << " (stiffness failure)";
            fail(ErrorCode::no_solution, msg.str());
        }
        std::vector<double> y_new;
        double err = 0.0;
        bool positivity_ok = true;
        const bool stepped = rk45_step(ctx, z, y, h_try, &y_new, &err, opts, &positivity_ok);
        if (!stepped) {
            if (!positivity_ok && h_try > 4.0 * h_min) {
                h = h_try * 0.25; // approach the crossing before reporting it
                continue;
            }
            std::ostringstream msg;
            msg << "moduli function dropped to zero near z = " << z + h_try
                << "; positivity abort";
            fail(ErrorCode::domain_error, msg.str());
        }
        if (err <= 1.0) {
            z += h_try;
            y = std::move(y_new);
            record_up_to(z, y);
            for (int s = 0; s < m; ++s) {
                if (y[s] <= 0.0) {
                    std::ostringstream msg;
                    msg << "moduli function " << s + 1 << " reached zero at z = " << z
                        << "; positivity abort";
                    fail(ErrorCode::domain_error, msg.str());
                }
                if (std::abs(y[s]) > opts.divergence_cap) {
                    run.diverged = true;
                    run.z_reached = z;
                    return run;
                }
            }
        }
        const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = h_try * std::min(5.0, std::max(0.2, factor));
    }
    run.completed = true;
    run.z_reached = z;
    return run;
}

OdeRun integrate_ode(const ModuliProblem& problem, const std::vector<double>& slopes,
                     double z_end, int grid_points, const OdeOptions& opts) {
    if (grid_points < 2) grid_points = 2;
    std::vector<double> zs(grid_points);
    for (int i = 0; i < grid_points; ++i)
        zs[i] = z_end * double(i) / double(grid_points - 1);
    return integrate_ode_at(problem, slopes, zs, opts);
}

ShootResult shoot(const ModuliProblem& problem, double delta) {
    const int m = problem.size();
    if (m > 3)
        fail(ErrorCode::unsupported, "shooting is limited to systems with at most 3 branes");
    if (m == 0) return ShootResult{{}, {}, 0.0};
    const double z_h = problem.z_horizon();
    if (delta <= 0.0) delta = 1e-4 * z_h;

    // Boundedness at the singular endpoint is equivalent to F H'/H -> 0;
    // extrapolate that quantity quadratically from three interior points.
    const double z1 = z_h - 3.0 * delta;
    const double z2 = z_h - 2.0 * delta;
    const double z3 = z_h - delta;
    OdeOptions opts;
    auto objective = [&](const std::vector<double>& slopes,
                         std::vector<double>* g_out, std::vector<double>* h0_out) -> bool {
        try {
            OdeRun run = integrate_ode_at(problem, slopes, {0.0, z1, z2, z3}, opts);
            if (!run.completed) return false;
            g_out->assign(m, 0.0);
            if (h0_out) h0_out->assign(m, 0.0);
            for (int s = 0; s < m; ++s) {
                double g[3], hv[3];
                for (int k = 0; k < 3; ++k) {
                    hv[k] = run.H[s][k + 1];
                    g[k] = (1.0 - 2.0 * problem.mu * run.z[k + 1]) * run.dH[s][k + 1] / hv[k];
                }
                // quadratic extrapolation to z_h on the uniform ladder
                (*g_out)[s] = 3.0 * g[2] - 3.0 * g[1] + g[0];
                if (h0_out) (*h0_out)[s] = 3.0 * hv[2] - 3.0 * hv[1] + hv[0];
            }
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    // Decoupled initial guess: treat each brane as an isolated chain.
    std::vector<double> guess(m, 0.0);
    for (int s = 0; s < m; ++s) {
        const double disc = problem.mu * problem.mu - problem.Bbar[s];
        guess[s] = disc >= 0.0 ? -problem.mu + std::sqrt(disc) : 0.0;
    }

    auto try_newton = [&](std::vector<double> x, int max_iters, ShootResult* out) -> bool {
        std::vector<double> g;
        if (!objective(x, &g, nullptr)) return false;
        auto norm = [](const std::vector<double>& v) {
            double mx = 0.0;
            for (double t : v) mx = std::max(mx, std::abs(t));
            return mx;
        };
        double gn = norm(g);
        for (int it = 0; it < max_iters && gn > 1e-10; ++it) {
            MatD jac(m, m);
            bool ok = true;
            for (int j = 0; j < m && ok; ++j) {
                const double step = 1e-6 * std::max(1.0, std::abs(x[j]));
                std::vector<double> xp = x, xm = x, gp, gm;
                xp[j] += step;
                xm[j] -= step;
                ok = objective(xp, &gp, nullptr) && objective(xm, &gm, nullptr);
                if (!ok) break;
                for (int i = 0; i < m; ++i) jac.at(i, j) = (gp[i] - gm[i]) / (2.0 * step);
            }
            if (!ok) return false;
            LuDecomposition lu = lu_factor(jac, 1e-300);
            if (lu.singular) return false;
            std::vector<double> rhs(m);
            for (int i = 0; i < m; ++i) rhs[i] = -g[i];
            std::vector<double> dx = lu_solve(lu, rhs);
            double alpha = 1.0;
            bool accepted = false;
            for (int bt = 0; bt < 16; ++bt) {
                std::vector<double> xt(m);
                for (int i = 0; i < m; ++i) xt[i] = x[i] + alpha * dx[i];
                std::vector<double> gt;
                if (objective(xt, &gt, nullptr) && norm(gt) < gn) {
                    x = std::move(xt);
                    g = std::move(gt);
                    gn = norm(g);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) break;
        }
        if (gn > 1e-8) return false;
        std::vector<double> h0;
        std::vector<double> gfin;
        if (!objective(x, &gfin, &h0)) return false;
        for (double hv : h0)
            if (!(hv > 0.0) || !std::isfinite(hv)) return false;
        out->slopes = x;
        out->H0 = h0;
        out->boundary_defect = gn;
        return true;
    };

    ShootResult result;
    if (try_newton(guess, 60, &result)) return result;

    // Coarse search box around the decoupled guess before giving up; the
    // per-start iteration budget is short, a nearby root converges fast.
    std::vector<double> box_lo(m), box_hi(m);
    for (int s = 0; s < m; ++s) {
        const double span = 2.0 * (std::abs(guess[s]) + problem.mu);
        box_lo[s] = guess[s] - span;
        box_hi[s] = guess[s] + span;
    }
    const int per_dim = (m == 1) ? 17 : (m == 2 ? 7 : 5);
    std::vector<int> idx(m, 0);
    while (true) {
        std::vector<double> x(m);
        for (int s = 0; s < m; ++s)
            x[s] = box_lo[s] + (box_hi[s] - box_lo[s]) * double(idx[s]) / double(per_dim - 1);
        if (try_newton(x, 20, &result)) return result;
        int pos = 0;
        while (pos < m && ++idx[pos] == per_dim) {
            idx[pos] = 0;
            ++pos;
        }
        if (pos == m) break;
    }
    fail(ErrorCode::no_solution,
         "no bounded positive trajectory found in the search box; the parameters may lie"
         " in the non-existence region reported by the existence check");
}

} // namespace tobra
