#ifndef TOBRA_MODULI_POLY_HPP
#define TOBRA_MODULI_POLY_HPP

#include <array>
#include <functional>
#include <vector>

#include "lie_cartan.hpp"
#include "linalg.hpp"
#include "poly.hpp"

namespace tobra {

// Boundary-value problem for the moduli functions H_s on (0, 1/(2 mu)):
//   d/dz[(1-2 mu z) H_s'/H_s] = Bbar_s prod_s' H_s'^(-A_ss')
// with H_s(0) = 1 and a finite positive limit at z = 1/(2 mu).
struct ModuliProblem {
    QuasiCartan A;
    double mu{1.0};
    std::vector<double> Bbar;
    DegreeVector degrees;

    int size() const { return A.size; }
    double z_horizon() const { return 1.0 / (2.0 * mu); }
};

ModuliProblem make_moduli_problem(const QuasiCartan& a, double mu,
                                  const std::vector<double>& bbar);

// One moduli polynomial H_s(z) = 1 + sum_k P^(k) z^k.
struct ModuliPolynomial {
    std::vector<double> p; // P^(1..n_s)

    Poly as_poly() const {
        Poly h(p.size() + 1);
        h[0] = 1.0;
        for (size_t k = 0; k < p.size(); ++k) h[k + 1] = p[k];
        return h;
    }
    double eval(double z) const { return poly_eval(as_poly(), z); }
    int degree() const { return int(p.size()); }
};

struct ModuliSolution {
    double mu{1.0};
    std::vector<double> Bbar;
    std::vector<ModuliPolynomial> h;
    double primary_residual{0.0};
    double overflow_residual{0.0};
    // Distinct extra Newton solutions found when probing was requested;
    // uniqueness is only conjectural, so these are reported, not hidden.
    std::vector<std::vector<ModuliPolynomial>> alternates;

    double h0(int s) const { return h[s].eval(1.0 / (2.0 * mu)); }
    std::vector<double> slopes() const {
        std::vector<double> out;
        for (const ModuliPolynomial& m : h) out.push_back(m.p.empty() ? 0.0 : m.p[0]);
        return out;
    }
};

// The algebraic system produced by inserting the polynomial ansatz into the
// moduli equation and clearing denominators. Coefficient equations of order
// z^0..z^(n_s-1) are the primary block (square against the unknowns); the
// higher-order ones must vanish identically at a true solution.
class PolySystem {
public:
    explicit PolySystem(const ModuliProblem& problem);

    int unknown_count() const { return total_; }
    int brane_count() const { return int(degrees_.size()); }
    const std::vector<int>& degrees() const { return degrees_; }

    // x is the concatenated coefficient vector (P_1^(1..n_1), P_2^(...), ...).
    std::vector<double> residual_primary(const std::vector<double>& x) const;
    std::vector<double> residual_overflow(const std::vector<double>& x) const;

    // Analytic derivative of the (scaled) coefficient equations; rows are
    // the primary block followed by the overflow block when full is set,
    // matching the residual layouts.
    MatD jacobian(const std::vector<double>& x, bool full) const;

    std::vector<Poly> h_polys(const std::vector<double>& x) const;
    std::vector<double> scaled_bbar() const { return bbar_; }

    // Equation polynomial for brane s: LHS*X - RHS after clearing
    // denominators, with the current Bbar.
    Poly equation_poly(const std::vector<Poly>& h, int s) const;

    void set_bbar(const std::vector<double>& bbar) { bbar_ = bbar; }

private:
    std::vector<int> degrees_;
    std::vector<int> offsets_;
    std::vector<int> eq_len_; // structural coefficient-equation count per brane
    int total_{0};
    double mu_{1.0};
    std::vector<double> bbar_;
    std::vector<std::vector<int>> a_int_; // integer quasi-Cartan entries
};

struct SolveOptions {
    // Convergence target for the scaled coefficient equations; the
    // difference-quotient Jacobian bottoms out around 1e-12 for large
    // charges, the final solution check is tighter anyway.
    double newton_tol{5e-12};
    int max_newton_iters{40};
    int max_homotopy_steps{32};
    double grid_residual_tol{1e-10};
    double overflow_tol{1e-9};
    bool probe_alternates{false};
    unsigned probe_seed{20260808};
};

// Polynomial-ansatz solve via Newton continuation from the trivial solution
// at Bbar = 0 (there every H_s is identically 1).
ModuliSolution solve_poly(const ModuliProblem& problem, const SolveOptions& opts = {});

struct A1ClosedForm {
    double p;         // branch continuous with p -> 0 as Bbar -> 0
    double alternate; // the other quadratic root
};

// P(P + 2 mu) = -Bbar.
A1ClosedForm closed_form_a1(double mu, double bbar);

// H_s = (1 + P_s z)^(b0_s) with P_s(P_s + 2 mu) = -Bbar_s/b0_s; P_s and
// Bbar_s/b0_s must coincide inside each block.
ModuliSolution closed_form_block_orthogonal(const std::vector<std::vector<int>>& blocks,
                                            double mu,
                                            const std::vector<double>& bbar,
                                            const std::vector<double>& b0);

struct A2ClosedForm {
    std::array<double, 2> p;        // P_s
    std::array<double, 2> p_second; // P_s^(2)
    std::array<double, 2> bbar;
};

// Generic branch, valid when P_1 + P_2 + 4 mu != 0.
A2ClosedForm closed_form_a2(double mu, double p1, double p2);

// Special branch at P_1 = P_2 = -2 mu with Bbar_1 + Bbar_2 = 4 mu^2.
A2ClosedForm closed_form_a2_special(double mu, double bbar1, double bbar2);

// Max absolute defect of the moduli equation over the grid, by exact
// polynomial differentiation and pointwise products.
double residual(const std::vector<ModuliPolynomial>& h, const ModuliProblem& problem,
                const std::vector<double>& grid);

std::vector<double> default_grid(const ModuliProblem& problem, int points);

} // namespace tobra

#endif
