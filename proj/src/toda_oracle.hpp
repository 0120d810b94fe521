#ifndef TOBRA_TODA_ORACLE_HPP
#define TOBRA_TODA_ORACLE_HPP

#include <vector>

#include "moduli_poly.hpp"

namespace tobra {

// Exact open-chain solution in the Vandermonde form: spectral parameters
// (v_r, w_r), r = 1..m+1, with sum w_r = 0 and prod v_r = Delta^-2(w).
// Valid for B_s > 0; degenerate and oscillatory regimes are refused.
struct TodaChainSolution {
    int m{0};
    std::vector<double> v;     // m+1, all nonzero
    std::vector<double> w;     // m+1, distinct, sum zero
    std::vector<double> B;     // m, positive
    std::vector<double> log_c; // normalization constants log C_s

    struct Term {
        double log_mag;
        double sign;
        double sum_w;
    };
    std::vector<std::vector<Term>> terms; // per s = 1..m, one entry per subset
};

// Builds the solution for given spectrum and couplings: solves the m+1
// normalization equations (product constraint plus q^s(0) = 0) for v by
// Newton in log space. Fails when the couplings are infeasible for the
// spectrum (the energy bound ties B to mu_bar).
TodaChainSolution make_toda_solution(int m, const std::vector<double>& w,
                                     const std::vector<double>& B);

// Builds the solution from positive spectral coefficients v_r (rescaled to
// the product constraint); the couplings B_s and normalizations follow
// from tau_s(0), so q^s(0) = 0 holds by construction and no root-finding
// is involved.
TodaChainSolution toda_solution_from_v(int m, std::vector<double> v,
                                       const std::vector<double>& w);

// Assembles a chain from explicit spectral data without calibration.
// Mixed-sign v_r are allowed here; evaluation then guards the log domain.
TodaChainSolution toda_solution_from_parameters(int m, const std::vector<double>& v,
                                                const std::vector<double>& w,
                                                const std::vector<double>& B);

// w_j = (2j - m - 2) mubar: the equally spaced spectrum the horizon
// asymptotics select.
std::vector<double> black_hole_spectrum(int m, double mu_bar);

TodaChainSolution black_hole_toda(int m, double mu_bar, const std::vector<double>& B);

// Horizon-spectrum chain with equal v_r; the couplings come out at the
// energy bound and need no calibration.
TodaChainSolution black_hole_toda_equal_v(int m, double mu_bar);

// q^s(u) via signed log-sum-exp over the C(m+1, s) index subsets.
std::vector<double> anderson_q(const TodaChainSolution& sol, double u);

struct TodaEnergy {
    double E_T;  // (1/2) sum w_r^2
    double E_TL; // (h/4) sum w_r^2
};

TodaEnergy toda_energy(const TodaChainSolution& sol, double h = 1.0);

struct HFromToda {
    std::vector<double> u;
    std::vector<double> z;                // z = (1 - e^{-2 mubar u}) / (2 mubar)
    std::vector<std::vector<double>> H;   // [s][i]
};

// H_s(u) = exp(-q^s - n_s mubar u), reparameterized to z. The calibration
// H_s(0) = 1 is checked to 1e-9.
HFromToda h_from_toda(const TodaChainSolution& sol, const std::vector<int>& n,
                      double mu_bar, const std::vector<double>& u_grid);

// Least-squares polynomial fit of samples; used to test the polynomial
// structure of Toda-derived moduli.
struct PolyFit {
    Poly coef;
    double max_error;
};

PolyFit fit_polynomial(const std::vector<double>& z, const std::vector<double>& y, int degree);

// Embedding of the C_{m+1} system into A_{2m+1} by mirror identification
// H_{-k} = H_k. A-side indices are 0-based with the fixed node at m.
struct FoldMap {
    int m{1};
    int a_rank{3};
    std::vector<std::vector<int>> to_a; // c index k -> one or two a indices
    std::vector<int> from_a;            // a index -> c index
    QuasiCartan folded;                 // C_{m+1} matrix rebuilt from A_{2m+1}

    std::vector<double> expand_bbar(const std::vector<double>& bbar_c) const;
    std::vector<ModuliPolynomial> extract_symmetric(
        const std::vector<ModuliPolynomial>& h_a, double tol = 1e-9) const;
};

FoldMap fold_c_to_a(int m);

struct OdeOptions {
    double rel_tol{1e-10};
    double abs_tol{1e-12};
    double divergence_cap{1e12};
};

struct OdeRun {
    std::vector<double> z;
    std::vector<std::vector<double>> H;  // [s][i]
    std::vector<std::vector<double>> dH; // [s][i]
    std::vector<double> slopes;
    bool completed{false};
    bool diverged{false};
    double z_reached{0.0};
};

// Adaptive Runge-Kutta integration of the moduli system as an IVP from
// z = 0 with H(0) = 1 and the given slopes.
OdeRun integrate_ode(const ModuliProblem& problem, const std::vector<double>& slopes,
                     double z_end, int grid_points = 256, const OdeOptions& opts = {});

// Same, recording at explicit sorted sample points (last one is z_end).
OdeRun integrate_ode_at(const ModuliProblem& problem, const std::vector<double>& slopes,
                        const std::vector<double>& z_samples, const OdeOptions& opts = {});

struct ShootResult {
    std::vector<double> slopes;
    std::vector<double> H0;       // Richardson-extrapolated horizon values
    double boundary_defect{0.0};  // extrapolated F H'/H at the horizon
};

// Root-finds initial slopes so the trajectory stays positive and bounded
// into the singular endpoint; |S| <= 3.
ShootResult shoot(const ModuliProblem& problem, double delta = -1.0);

} // namespace tobra

#endif
