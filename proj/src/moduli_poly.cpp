#include "moduli_poly.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "linalg.hpp"

namespace tobra {

ModuliProblem make_moduli_problem(const QuasiCartan& a, double mu,
                                  const std::vector<double>& bbar) {
    if (mu <= 0.0) fail(ErrorCode::invalid_input, "extremality parameter mu must be positive");
    if ((int)bbar.size() != a.size)
        fail(ErrorCode::invalid_input, "Bbar length does not match the matrix size");
    ModuliProblem p;
    p.A = a;
    p.mu = mu;
    p.Bbar = bbar;
    p.degrees = polynomial_degrees(a);
    return p;
}

PolySystem::PolySystem(const ModuliProblem& problem) : mu_(problem.mu), bbar_(problem.Bbar) {
    const int m = problem.size();
    if (!problem.degrees.all_positive_integers)
        fail(ErrorCode::unsupported,
             "polynomial ansatz requires positive integer degrees; use the ODE oracle instead");
    a_int_.assign(m, std::vector<int>(m, 0));
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) {
            const Rational& e = problem.A.at(s, t);
            if (!e.is_integer())
                fail(ErrorCode::unsupported,
                     "polynomial ansatz requires integer quasi-Cartan entries; use the ODE oracle");
            a_int_[s][t] = int(e.num());
        }
    degrees_ = problem.degrees.as_ints();
    offsets_.resize(m);
    eq_len_.resize(m);
    for (int s = 0; s < m; ++s) {
        offsets_[s] = total_;
        total_ += degrees_[s];
    }
    // Structural equation count per brane: the left side tops out at
    // 2 n_s - 2 (the leading coefficients cancel identically), the right
    // side at the degree budget of the moved-over factors.
    for (int s = 0; s < m; ++s) {
        int lhs_deg = 2 * degrees_[s] - 2;
        int rhs_deg = 0;
        for (int t = 0; t < m; ++t) {
            if (t == s) continue;
            if (a_int_[s][t] > 0) lhs_deg += a_int_[s][t] * degrees_[t];
            else rhs_deg += -a_int_[s][t] * degrees_[t];
        }
        eq_len_[s] = std::max(std::max(lhs_deg, rhs_deg) + 1, degrees_[s]);
    }
}

std::vector<Poly> PolySystem::h_polys(const std::vector<double>& x) const {
    std::vector<Poly> h;
    h.reserve(degrees_.size());
    for (size_t s = 0; s < degrees_.size(); ++s) {
        Poly p(degrees_[s] + 1, 0.0);
        p[0] = 1.0;
        for (int k = 0; k < degrees_[s]; ++k) p[k + 1] = x[offsets_[s] + k];
        h.push_back(std::move(p));
    }
    return h;
}

Poly PolySystem::equation_poly(const std::vector<Poly>& h, int s) const {
    const Poly& hs = h[s];
    Poly d1 = poly_derivative(hs);
    Poly d2 = poly_derivative(d1);
    // (1 - 2 mu z)(H'' H - H'^2) - 2 mu H' H
    Poly wron = poly_sub(poly_mul(d2, hs), poly_mul(d1, d1));
    Poly lhs = poly_sub(poly_mul(Poly{1.0, -2.0 * mu_}, wron),
                        poly_scale(poly_mul(d1, hs), 2.0 * mu_));
    // Positive off-diagonal powers stay on the left, negative ones move to
    // the right so both sides are polynomials.
    Poly rhs{bbar_[s]};
    for (size_t t = 0; t < h.size(); ++t) {
        if ((int)t == s) continue;
        const int e = a_int_[s][t];
        if (e > 0) lhs = poly_mul(lhs, poly_pow(h[t], e));
        else if (e < 0) rhs = poly_mul(rhs, poly_pow(h[t], -e));
    }
    Poly eq = poly_sub(lhs, rhs);
    // The top coefficient cancels identically (n(n-1) - n^2 = -n balances
    // the first-derivative term); drop exact zeros so the equation count
    // matches the power expansion.
    while (eq.size() > 1 && eq.back() == 0.0) eq.pop_back();
    return eq;
}

std::vector<double> PolySystem::residual_primary(const std::vector<double>& x) const {
    std::vector<Poly> h = h_polys(x);
    std::vector<double> out;
    out.reserve(total_);
    for (size_t s = 0; s < degrees_.size(); ++s) {
        Poly eq = equation_poly(h, int(s));
        const double scale = std::max(1.0, std::abs(bbar_[s]));
        for (int j = 0; j < degrees_[s]; ++j)
            out.push_back((j < (int)eq.size() ? eq[j] : 0.0) / scale);
    }
    return out;
}

std::vector<double> PolySystem::residual_overflow(const std::vector<double>& x) const {
    std::vector<Poly> h = h_polys(x);
    std::vector<double> out;
    for (size_t s = 0; s < degrees_.size(); ++s) {
        Poly eq = equation_poly(h, int(s));
        const double scale = std::max(1.0, std::abs(bbar_[s]));
        for (int j = degrees_[s]; j < eq_len_[s]; ++j)
            out.push_back((j < (int)eq.size() ? eq[j] : 0.0) / scale);
    }
    return out;
}

MatD PolySystem::jacobian(const std::vector<double>& x, bool full) const {
    const int m = brane_count();
    std::vector<Poly> h = h_polys(x);
    int overflow_rows = 0;
    for (int s = 0; s < m; ++s) overflow_rows += eq_len_[s] - degrees_[s];
    MatD jac(total_ + (full ? overflow_rows : 0), total_);

    std::vector<int> ovf_off(m);
    int acc = total_;
    for (int s = 0; s < m; ++s) {
        ovf_off[s] = acc;
        acc += eq_len_[s] - degrees_[s];
    }

    for (int s = 0; s < m; ++s) {
        const double scale = 1.0 / std::max(1.0, std::abs(bbar_[s]));
        Poly d1 = poly_derivative(h[s]);
        Poly d2 = poly_derivative(d1);
        Poly l = poly_sub(
            poly_mul(Poly{1.0, -2.0 * mu_}, poly_sub(poly_mul(d2, h[s]), poly_mul(d1, d1))),
            poly_scale(poly_mul(d1, h[s]), 2.0 * mu_));
        Poly xprod{1.0};
        for (int t = 0; t < m; ++t)
            if (t != s && a_int_[s][t] > 0) xprod = poly_mul(xprod, poly_pow(h[t], a_int_[s][t]));

        auto put_column = [&](int t, int k, const Poly& de) {
            const int col = offsets_[t] + k;
            for (int j = 0; j < degrees_[s]; ++j)
                jac.at(offsets_[s] + j, col) = (j < (int)de.size() ? de[j] : 0.0) * scale;
            if (full)
                for (int j = degrees_[s]; j < eq_len_[s]; ++j)
                    jac.at(ovf_off[s] + (j - degrees_[s]), col) =
                        (j < (int)de.size() ? de[j] : 0.0) * scale;
        };

        // Own coefficients enter through the left side only.
        for (int k = 1; k <= degrees_[s]; ++k) {
            Poly mono(k + 1, 0.0);
            mono[k] = 1.0;
            Poly m1 = poly_derivative(mono);
            Poly m2 = poly_derivative(m1);
            Poly bilinear = poly_sub(poly_add(poly_mul(m2, h[s]), poly_mul(d2, mono)),
                                     poly_scale(poly_mul(d1, m1), 2.0));
            Poly dl = poly_sub(poly_mul(Poly{1.0, -2.0 * mu_}, bilinear),
                               poly_scale(poly_add(poly_mul(m1, h[s]), poly_mul(d1, mono)),
                                          2.0 * mu_));
            put_column(s, k - 1, poly_mul(dl, xprod));
        }

        // Neighbours enter through the moved-over power products.
        for (int t = 0; t < m; ++t) {
            if (t == s || a_int_[s][t] == 0) continue;
            const int a = a_int_[s][t];
            Poly rest{a > 0 ? double(a) : bbar_[s] * double(-a)};
            for (int u = 0; u < m; ++u) {
                if (u == s || u == t) continue;
                if (a > 0 && a_int_[s][u] > 0) rest = poly_mul(rest, poly_pow(h[u], a_int_[s][u]));
                if (a < 0 && a_int_[s][u] < 0) rest = poly_mul(rest, poly_pow(h[u], -a_int_[s][u]));
            }
            rest = poly_mul(rest, poly_pow(h[t], std::abs(a) - 1));
            if (a > 0) rest = poly_mul(rest, l);
            else rest = poly_scale(rest, -1.0);
            for (int k = 1; k <= degrees_[t]; ++k) {
                Poly shifted(rest.size() + k, 0.0);
                for (size_t c = 0; c < rest.size(); ++c) shifted[c + k] = rest[c];
                put_column(t, k - 1, shifted);
            }
        }
    }
    return jac;
}

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> residual_of(const PolySystem& sys, const std::vector<double>& x,
                                bool full) {
    std::vector<double> r = sys.residual_primary(x);
    if (full) {
        std::vector<double> o = sys.residual_overflow(x);
        r.insert(r.end(), o.begin(), o.end());
    }
    return r;
}

struct NewtonResult {
    std::vector<double> x;
    double residual{0.0};
    bool converged{false};
};

// Newton on the square primary block (full = false) or Gauss-Newton over
// all coefficient equations (full = true). The full variant keeps the
// continuation from drifting onto spurious primary-only branches near the
// extremal limit, where the square Jacobian degenerates.
NewtonResult newton_solve(const PolySystem& sys, std::vector<double> x,
                          double tol, int max_iters, bool full) {
    NewtonResult res;
    const int n = int(x.size());
    auto norm2 = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double t : v) acc += t * t;
        return acc;
    };
    std::vector<double> r = residual_of(sys, x, full);
    double rnorm = max_abs(r);
    double rsq = norm2(r);
    for (int it = 0; it < max_iters; ++it) {
        if (rnorm <= tol) break;
        const int rows = int(r.size());
        MatD jac = sys.jacobian(x, full);
        std::vector<double> dx;
        try {
            if (full) {
                std::vector<double> neg(rows);
                for (int i = 0; i < rows; ++i) neg[i] = -r[i];
                dx = least_squares(jac, neg);
            } else {
                LuDecomposition lu = lu_factor(jac, 1e-300);
                if (lu.singular) break;
                std::vector<double> rhs(n);
                for (int i = 0; i < n; ++i) rhs[i] = -r[i];
                dx = lu_solve(lu, rhs);
            }
        } catch (const Error&) {
            break;
        }
        // Backtracking on the sum of squares (the quantity Gauss-Newton
        // actually descends) keeps the continuation on its branch when a
        // full step overshoots.
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt) {
            std::vector<double> xt(n);
            for (int i = 0; i < n; ++i) xt[i] = x[i] + alpha * dx[i];
            std::vector<double> rt = residual_of(sys, xt, full);
            double rtsq = norm2(rt);
            if (rtsq < rsq || max_abs(rt) <= tol) {
                x = std::move(xt);
                r = std::move(rt);
                rsq = rtsq;
                rnorm = max_abs(r);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    res.x = std::move(x);
    res.residual = rnorm;
    res.converged = rnorm <= tol;
    return res;
}

void check_positivity(const ModuliSolution& sol, double z_h) {
    const int samples = 512;
    for (size_t s = 0; s < sol.h.size(); ++s)
        for (int i = 0; i <= samples; ++i) {
            const double z = z_h * double(i) / samples;
            if (sol.h[s].eval(z) <= 0.0) {
                std::ostringstream msg;
                msg << "moduli function " << s + 1 << " is not positive at z = " << z;
                fail(ErrorCode::no_solution, msg.str());
            }
        }
}

} // namespace

ModuliSolution solve_poly(const ModuliProblem& problem, const SolveOptions& opts) {
    const int m = problem.size();
    ModuliSolution sol;
    sol.mu = problem.mu;
    sol.Bbar = problem.Bbar;
    if (m == 0) return sol;

    PolySystem sys(problem);

    // The target solutions are positive on the whole interval, and so are
    // the intermediate ones along the charge scaling, so positivity doubles
    // as a branch guard against landing on spurious algebraic roots.
    auto stays_positive = [&](const std::vector<double>& x) {
        std::vector<Poly> h = sys.h_polys(x);
        for (const Poly& p : h)
            for (int i = 0; i <= 64; ++i)
                if (poly_eval(p, problem.z_horizon() * double(i) / 64) <= 0.0) return false;
        return true;
    };

    // Continuation in t scaling Bbar from 0 (where H == 1 solves the system
    // exactly) up to the requested charges. Near t = 0 the branch grows
    // like sqrt(t) once t |Bbar| exceeds mu^2, so the ladder is geometric:
    // it starts inside the mu-dominated regime and doubles, which keeps
    // every Newton start within the branch's basin.
    auto run_homotopy = [&](bool full, std::vector<double>* x_out, double* last_res) {
        std::vector<double> x(sys.unknown_count(), 0.0);
        double bmax = 0.0;
        for (double b : problem.Bbar) bmax = std::max(bmax, std::abs(b));
        double t0 = std::min(0.25, problem.mu * problem.mu / std::max(1.0, bmax));
        t0 = std::max(t0, std::pow(2.0, -(opts.max_homotopy_steps - 1)));
        double t = 0.0;
        double t_next = t0;
        int attempts = 0;
        while (t < 1.0) {
            if (++attempts > 3 * opts.max_homotopy_steps) break;
            std::vector<double> bbar_t(m);
            for (int s = 0; s < m; ++s) bbar_t[s] = t_next * problem.Bbar[s];
            sys.set_bbar(bbar_t);
            NewtonResult nr =
                newton_solve(sys, x, opts.newton_tol, opts.max_newton_iters, full);
            *last_res = nr.residual;
            if (nr.converged && stays_positive(nr.x)) {
                t = t_next;
                x = std::move(nr.x);
                t_next = std::min(1.0, 2.0 * t);
            } else if (t == 0.0) {
                t_next *= 0.25; // shrink the entry point
                if (t_next < 1e-12) break;
            } else {
                t_next = 0.5 * (t + t_next); // bisect toward the last good point
                if (t_next - t < 1e-6 * std::max(t, 1e-3)) break;
            }
        }
        *x_out = std::move(x);
        return t >= 1.0;
    };

    std::vector<double> x;
    double last_residual = 0.0;
    bool reached = run_homotopy(true, &x, &last_residual);
    if (!reached) {
        // The full system may be inconsistent (ansatz failure); the square
        // primary block can still be solvable and its solution carries the
        // diagnostic overflow residual.
        reached = run_homotopy(false, &x, &last_residual);
        if (reached) {
            // When the primary track lands near a genuine solution, a full
            // polish closes the remaining overflow gap; an inconsistent
            // ansatz leaves it stuck and keeps the diagnostic.
            sys.set_bbar(problem.Bbar);
            NewtonResult polish =
                newton_solve(sys, x, opts.newton_tol, opts.max_newton_iters, true);
            if (polish.converged && stays_positive(polish.x)) x = std::move(polish.x);
        }
    }
    if (!reached) {
        std::ostringstream msg;
        msg << "Newton continuation failed to reach the requested charges"
            << " (last residual " << last_residual << ")";
        bool positive_bbar = false;
        for (double b : problem.Bbar) positive_bbar |= (b > 0.0);
        if (positive_bbar)
            msg << "; some Bbar_s > 0, the parameters may lie in the non-existence"
                << " region reported by the existence check";
        fail(ErrorCode::no_solution, msg.str());
    }

    sys.set_bbar(problem.Bbar);
    sol.primary_residual = max_abs(sys.residual_primary(x));
    sol.overflow_residual = max_abs(sys.residual_overflow(x));
    if (sol.primary_residual > opts.grid_residual_tol)
        fail(ErrorCode::no_solution, "polished solution residual exceeds tolerance");
    if (sol.overflow_residual > opts.overflow_tol) {
        std::ostringstream msg;
        if (problem.A.algebra_tag) {
            // For a catalog Cartan matrix the polynomial structure is
            // guaranteed whenever the boundary-value problem is solvable,
            // so a consistent primary block with violated overflow rows
            // means no solution exists at these parameters.
            msg << "no polynomial solution found at these parameters (overflow residual "
                << sol.overflow_residual << ")";
            bool positive_bbar = false;
            for (double b : problem.Bbar) positive_bbar |= (b > 0.0);
            if (positive_bbar)
                msg << "; some Bbar_s > 0, the parameters may lie in the non-existence"
                    << " region reported by the existence check";
            fail(ErrorCode::no_solution, msg.str());
        }
        msg << "overflow equations do not vanish (max " << sol.overflow_residual
            << "); the polynomial ansatz is inconsistent for this matrix";
        fail(ErrorCode::unsupported, msg.str());
    }

    int off = 0;
    for (int s = 0; s < m; ++s) {
        const int n_s = sys.degrees()[s];
        ModuliPolynomial hp;
        hp.p.assign(x.begin() + off, x.begin() + off + n_s);
        off += n_s;
        sol.h.push_back(std::move(hp));
    }
    check_positivity(sol, problem.z_horizon());

    if (opts.probe_alternates) {
        std::mt19937 rng(opts.probe_seed);
        std::uniform_real_distribution<double> jitter(-1.0, 1.0);
        const double spread = 1.0 + max_abs(x);
        for (int probe = 0; probe < 12; ++probe) {
            std::vector<double> x0(x.size());
            for (size_t i = 0; i < x.size(); ++i) x0[i] = x[i] + spread * jitter(rng);
            NewtonResult nr =
                newton_solve(sys, x0, opts.newton_tol, opts.max_newton_iters, true);
            if (!nr.converged) continue;
            if (max_abs(sys.residual_overflow(nr.x)) > opts.overflow_tol) continue;
            double dist = 0.0;
            for (size_t i = 0; i < x.size(); ++i)
                dist = std::max(dist, std::abs(nr.x[i] - x[i]));
            if (dist <= 1e-6) continue;
            bool duplicate = false;
            for (const auto& alt : sol.alternates) {
                double d2 = 0.0;
                int pos = 0;
                for (size_t s = 0; s < alt.size(); ++s)
                    for (double c : alt[s].p) {
                        d2 = std::max(d2, std::abs(c - nr.x[pos]));
                        ++pos;
                    }
                if (d2 <= 1e-6) { duplicate = true; break; }
            }
            if (duplicate) continue;
            std::vector<ModuliPolynomial> alt;
            int pos = 0;
            bool positive = true;
            for (int s = 0; s < m; ++s) {
                ModuliPolynomial hp;
                hp.p.assign(nr.x.begin() + pos, nr.x.begin() + pos + sys.degrees()[s]);
                pos += sys.degrees()[s];
                for (int i = 0; i <= 64; ++i) {
                    const double z = problem.z_horizon() * double(i) / 64;
                    if (hp.eval(z) <= 0.0) { positive = false; break; }
                }
                alt.push_back(std::move(hp));
            }
            if (positive) sol.alternates.push_back(std::move(alt));
        }
    }
    return sol;
}

A1ClosedForm closed_form_a1(double mu, double bbar) {
    const double disc = mu * mu - bbar;
    if (disc < 0.0)
        fail(ErrorCode::no_solution,
             "mu^2 - Bbar < 0: the quadratic for P has no real root");
    A1ClosedForm out;
    out.p = -mu + std::sqrt(disc);
    out.alternate = -mu - std::sqrt(disc);
    return out;
}

ModuliSolution closed_form_block_orthogonal(const std::vector<std::vector<int>>& blocks,
                                            double mu,
                                            const std::vector<double>& bbar,
                                            const std::vector<double>& b0) {
    const int m = int(bbar.size());
    if (b0.size() != bbar.size())
        fail(ErrorCode::invalid_input, "b0 and Bbar must have the same length");
    std::vector<int> covered(m, 0);
    ModuliSolution sol;
    sol.mu = mu;
    sol.Bbar = bbar;
    sol.h.resize(m);
    for (const std::vector<int>& block : blocks) {
        if (block.empty()) fail(ErrorCode::invalid_input, "empty block");
        const double ratio0 = bbar[block[0]] / b0[block[0]];
        for (int s : block) {
            if (s < 0 || s >= m) fail(ErrorCode::invalid_input, "block index out of range");
            covered[s] += 1;
            const double ratio = bbar[s] / b0[s];
            if (std::abs(ratio - ratio0) > 1e-12 * std::max(1.0, std::abs(ratio0)))
                fail(ErrorCode::invalid_input,
                     "Bbar_s/b0_s must coincide inside each block");
        }
        for (int s : block) {
            const double nb = b0[s];
            const long long n_int = std::llround(nb);
            if (std::abs(nb - double(n_int)) > 1e-9 || n_int < 1)
                fail(ErrorCode::unsupported,
                     "block-orthogonal closed form needs positive integer b0 for a polynomial");
            const double p = closed_form_a1(mu, ratio0).p;
            // (1 + P z)^(b0) expanded binomially.
            ModuliPolynomial hp;
            double binom = 1.0;
            for (long long k = 1; k <= n_int; ++k) {
                binom = binom * double(n_int - k + 1) / double(k);
                hp.p.push_back(binom * std::pow(p, double(k)));
            }
            sol.h[s] = std::move(hp);
        }
    }
    for (int s = 0; s < m; ++s)
        if (covered[s] != 1)
            fail(ErrorCode::invalid_input, "blocks must partition the brane set");
    return sol;
}

A2ClosedForm closed_form_a2(double mu, double p1, double p2) {
    const double denom = p1 + p2 + 4.0 * mu;
    if (denom == 0.0)
        fail(ErrorCode::domain_error,
             "generic branch undefined at P_1 + P_2 + 4 mu = 0; use the special branch");
    A2ClosedForm out;
    const double p[2] = {p1, p2};
    for (int s = 0; s < 2; ++s) {
        const double ps = p[s];
        const double pn = p[1 - s];
        out.p[s] = ps;
        out.p_second[s] = ps * pn * (ps + 2.0 * mu) / (2.0 * denom);
        out.bbar[s] = -ps * (ps + 2.0 * mu) * (ps + 4.0 * mu) / denom;
    }
    return out;
}

A2ClosedForm closed_form_a2_special(double mu, double bbar1, double bbar2) {
    if (bbar1 <= 0.0 || bbar2 <= 0.0)
        fail(ErrorCode::invalid_input, "special branch requires Bbar_s > 0");
    if (std::abs(bbar1 + bbar2 - 4.0 * mu * mu) > 1e-12 * std::max(1.0, 4.0 * mu * mu))
        fail(ErrorCode::invalid_input, "special branch requires Bbar_1 + Bbar_2 = 4 mu^2");
    A2ClosedForm out;
    const double b[2] = {bbar1, bbar2};
    for (int s = 0; s < 2; ++s) {
        out.p[s] = -2.0 * mu;
        out.p_second[s] = 0.5 * b[s];
        out.bbar[s] = b[s];
    }
    return out;
}

double residual(const std::vector<ModuliPolynomial>& h, const ModuliProblem& problem,
                const std::vector<double>& grid) {
    const int m = problem.size();
    if ((int)h.size() != m)
        fail(ErrorCode::invalid_input, "moduli set size does not match the problem");
    std::vector<Poly> hp, d1, d2;
    for (const ModuliPolynomial& mp : h) {
        hp.push_back(mp.as_poly());
        d1.push_back(poly_derivative(hp.back()));
        d2.push_back(poly_derivative(d1.back()));
    }
    double worst = 0.0;
    for (double z : grid) {
        if (z < 0.0 || z > problem.z_horizon() * (1.0 + 1e-12))
            fail(ErrorCode::invalid_input, "residual grid point outside [0, 1/(2 mu)]");
        const double f = 1.0 - 2.0 * problem.mu * z;
        std::vector<double> hv(m);
        for (int s = 0; s < m; ++s) {
            hv[s] = poly_eval(hp[s], z);
            if (hv[s] <= 0.0) {
                std::ostringstream msg;
                msg << "moduli function " << s + 1 << " is not positive at z = " << z;
                fail(ErrorCode::domain_error, msg.str());
            }
        }
        for (int s = 0; s < m; ++s) {
            const double h1 = poly_eval(d1[s], z);
            const double h2 = poly_eval(d2[s], z);
            const double lhs = (f * h2 - 2.0 * problem.mu * h1) / hv[s] -
                               f * (h1 / hv[s]) * (h1 / hv[s]);
            double rhs = problem.Bbar[s];
            for (int t = 0; t < m; ++t)
                rhs *= std::pow(hv[t], -problem.A.at(s, t).to_double());
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

std::vector<double> default_grid(const ModuliProblem& problem, int points) {
    std::vector<double> grid;
    grid.reserve(points);
    for (int i = 1; i <= points; ++i)
        grid.push_back(problem.z_horizon() * double(i) / double(points));
    return grid;
}

} // namespace tobra
