#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "toda_oracle.hpp"
#include "support.hpp"

using namespace tobra;

namespace {

// 4th-order second-difference stencil; accurate enough to certify the
// chain equations to well below 1e-7.
double second_diff(const std::function<double(double)>& f, double u, double h) {
    return (-f(u + 2 * h) + 16 * f(u + h) - 30 * f(u) + 16 * f(u - h) - f(u - 2 * h)) /
           (12 * h * h);
}

double chain_equation_residual(const TodaChainSolution& sol, double u_max, int points) {
    const int m = sol.m;
    QuasiCartan a = cartan_matrix(AlgebraFamily::A, m);
    double worst = 0.0;
    const double h = 1e-3;
    for (int i = 0; i <= points; ++i) {
        const double u = u_max * double(i) / points;
        std::vector<double> q = anderson_q(sol, u);
        for (int s = 0; s < m; ++s) {
            auto qs = [&](double uu) { return anderson_q(sol, uu)[s]; };
            const double lhs = second_diff(qs, u, h);
            double expo = 0.0;
            for (int t = 0; t < m; ++t) expo += a.at(s, t).to_double() * q[t];
            const double rhs = -sol.B[s] * std::exp(expo);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

// Energy along the trajectory from finite-difference velocities.
double energy_at(const TodaChainSolution& sol, double u) {
    const int m = sol.m;
    QuasiCartan a = cartan_matrix(AlgebraFamily::A, m);
    const double h = 1e-4;
    std::vector<double> qp = anderson_q(sol, u + h);
    std::vector<double> qm = anderson_q(sol, u - h);
    std::vector<double> q = anderson_q(sol, u);
    std::vector<double> qdot(m);
    for (int s = 0; s < m; ++s) qdot[s] = (qp[s] - qm[s]) / (2 * h);
    double e = 0.0;
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) e += 0.5 * a.at(s, t).to_double() * qdot[s] * qdot[t];
    for (int s = 0; s < m; ++s) {
        double expo = 0.0;
        for (int t = 0; t < m; ++t) expo += a.at(s, t).to_double() * q[t];
        e += sol.B[s] * std::exp(expo);
    }
    return e;
}

} // namespace

TEST_CASE("horizon spectrum") {
    std::vector<double> w2 = black_hole_spectrum(2, 1.0);
    CHECK(w2 == std::vector<double>{-2.0, 0.0, 2.0});
    CHECK(black_hole_spectrum(1, 1.0) == std::vector<double>{-1.0, 1.0});
    CHECK(black_hole_spectrum(3, 2.0) == std::vector<double>{-6.0, -2.0, 2.0, 6.0});
    double sum = 0.0;
    for (double w : black_hole_spectrum(5, 0.7)) sum += w;
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("spectral-coefficient construction pins q(0) = 0 and the constraints") {
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> jitter(0.3, 3.0);
    for (int m = 1; m <= 3; ++m) {
        std::vector<double> v(m + 1);
        for (double& vr : v) vr = jitter(rng);
        TodaChainSolution sol = toda_solution_from_v(m, v, black_hole_spectrum(m, 0.9));
        std::vector<double> q0 = anderson_q(sol, 0.0);
        for (double q : q0) CHECK(q == doctest::Approx(0.0).epsilon(1e-12));
        for (double b : sol.B) CHECK(b > 0.0);
        // prod v = Delta^-2(w), sum w = 0
        double log_prod = 0.0;
        for (double vr : sol.v) {
            CHECK(vr > 0.0);
            log_prod += std::log(vr);
        }
        double log_delta_sq = 0.0;
        for (int i = 0; i <= m; ++i)
            for (int j = i + 1; j <= m; ++j)
                log_delta_sq += 2.0 * std::log(std::abs(sol.w[i] - sol.w[j]));
        CHECK(log_prod == doctest::Approx(-log_delta_sq).epsilon(1e-10));
    }
}

TEST_CASE("prescribed-coupling calibration round trip") {
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> jitter(0.5, 2.0);
    for (int m = 1; m <= 3; ++m) {
        // Feasible couplings: read them off a v-built chain, then shrink
        // into the interior of the existence region.
        std::vector<double> v(m + 1);
        for (double& vr : v) vr = jitter(rng);
        std::vector<double> w = black_hole_spectrum(m, 1.1);
        TodaChainSolution reference = toda_solution_from_v(m, v, w);
        std::vector<double> target = reference.B;
        for (double& b : target) b *= 0.8;
        TodaChainSolution sol = make_toda_solution(m, w, target);
        for (double q : anderson_q(sol, 0.0))
            CHECK(q == doctest::Approx(0.0).epsilon(1e-10));
        double log_prod = 0.0;
        for (double vr : sol.v) log_prod += std::log(std::abs(vr));
        double log_delta_sq = 0.0;
        for (int i = 0; i <= m; ++i)
            for (int j = i + 1; j <= m; ++j)
                log_delta_sq += 2.0 * std::log(std::abs(sol.w[i] - sol.w[j]));
        CHECK(log_prod == doctest::Approx(-log_delta_sq).epsilon(1e-9));
    }
    // Couplings beyond the energy bound are infeasible: for one brane the
    // bound reads B <= mu_bar^2.
    CHECK_THROWS_AS(make_toda_solution(1, black_hole_spectrum(1, 0.9), {1.0}), Error);
}

TEST_CASE("rank-1 chain matches the two-exponential form") {
    TodaChainSolution sol = toda_solution_from_v(1, {0.7, 1.6}, black_hole_spectrum(1, 1.0));
    // tau_1 = v_1 e^{w_1 u} + v_2 e^{w_2 u}, q = log C_1 - log tau_1.
    for (double u : {0.0, 0.3, 1.0, 2.5}) {
        const double tau = sol.v[0] * std::exp(sol.w[0] * u) + sol.v[1] * std::exp(sol.w[1] * u);
        const double expected = sol.log_c[0] - std::log(tau);
        CHECK(anderson_q(sol, u)[0] == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("chain equations hold pointwise via second differences") {
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> jitter(0.4, 2.5);
    for (int m = 1; m <= 3; ++m) {
        std::vector<double> v(m + 1);
        for (double& vr : v) vr = jitter(rng);
        TodaChainSolution sol = toda_solution_from_v(m, v, black_hole_spectrum(m, 0.9));
        CHECK(chain_equation_residual(sol, 5.0, 40) <= 1e-7);
    }
    // Denser probe on a shorter window, where roundoff in the stencil is
    // smaller.
    TodaChainSolution sol = toda_solution_from_v(2, {0.8, 1.1, 1.7}, black_hole_spectrum(2, 0.9));
    CHECK(chain_equation_residual(sol, 3.0, 200) <= 1e-8);
}

TEST_CASE("energy is conserved and equals the spectral sum") {
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> jitter(0.4, 2.5);
    for (int m = 1; m <= 3; ++m) {
        std::vector<double> v(m + 1);
        for (double& vr : v) vr = jitter(rng);
        TodaChainSolution sol = toda_solution_from_v(m, v, black_hole_spectrum(m, 0.8));
        const double e_spec = toda_energy(sol).E_T;
        double sum_w2 = 0.0;
        for (double w : sol.w) sum_w2 += w * w;
        CHECK(e_spec == doctest::Approx(0.5 * sum_w2).epsilon(1e-15));
        for (int i = 0; i <= 10; ++i) {
            const double u = 0.5 + 4.5 * i / 10.0;
            CHECK(energy_at(sol, u) == doctest::Approx(e_spec).epsilon(1e-6));
        }
    }
}

TEST_CASE("spectral energies") {
    TodaChainSolution sol = black_hole_toda_equal_v(2, 1.0);
    CHECK(toda_energy(sol).E_T == doctest::Approx(4.0).epsilon(1e-15));
    // E_TL = (h/4) sum w^2 equals mu_bar^2 sum_ss' h A^{ss'} for the
    // horizon spectrum; A_2 with h = 1/2 gives mu_bar^2.
    CHECK(toda_energy(sol, 0.5).E_TL == doctest::Approx(1.0).epsilon(1e-14));
    for (int m = 1; m <= 3; ++m) {
        const double mu_bar = 1.3;
        TodaChainSolution chain = black_hole_toda_equal_v(m, mu_bar);
        const double h = 0.5;
        RatMatrix inv = inverse_cartan(cartan_matrix(AlgebraFamily::A, m));
        Rational inv_sum(0);
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t) inv_sum += inv.at(s, t);
        const double expected = mu_bar * mu_bar * h * inv_sum.to_double();
        CHECK(toda_energy(chain, h).E_TL == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("degenerate and non-positive inputs are refused") {
    CHECK_THROWS_AS(make_toda_solution(1, {0.5, 0.5}, {1.0}), Error);       // coinciding w
    CHECK_THROWS_AS(make_toda_solution(1, {-1.0, 1.0}, {-1.0}), Error);     // B <= 0
    CHECK_THROWS_AS(make_toda_solution(1, {-1.0, 0.5}, {1.0}), Error);      // sum w != 0
}

TEST_CASE("log domain violations carry the offending point") {
    // Two negative v's keep prod v = Delta^-2 > 0 but push tau_1 below
    // zero near u = 0.
    TodaChainSolution sol =
        toda_solution_from_parameters(2, {-1.0, -1.0, 0.25}, {-1.0, 0.0, 1.0}, {1.0, 1.0});
    CHECK_THROWS_WITH_AS(anderson_q(sol, 0.0), doctest::Contains("u = 0"), Error);
}

TEST_CASE("Toda moduli are polynomials in z of the predicted degree") {
    // Empirical polynomiality check for m up to 4, with uneven spectral
    // coefficients.
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> jitter(0.5, 2.0);
    for (int m = 1; m <= 4; ++m) {
        const double mu_bar = 0.8;
        std::vector<double> v(m + 1);
        for (double& vr : v) vr = jitter(rng);
        TodaChainSolution sol = toda_solution_from_v(m, v, black_hole_spectrum(m, mu_bar));
        std::vector<int> degrees = polynomial_degrees(cartan_matrix(AlgebraFamily::A, m)).as_ints();
        std::vector<double> u_grid;
        for (int i = 0; i <= 120; ++i) u_grid.push_back(3.5 * i / 120.0 / mu_bar);
        HFromToda h = h_from_toda(sol, degrees, mu_bar, u_grid);
        for (int s = 0; s < m; ++s) {
            CHECK(h.H[s][0] == doctest::Approx(1.0).epsilon(1e-12));
            PolyFit fit = fit_polynomial(h.z, h.H[s], degrees[s]);
            CHECK(fit.max_error <= 1e-9);
            CHECK(fit.coef[0] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("rank-2 Toda moduli match the generic closed form") {
    const double mu_bar = 1.0;
    TodaChainSolution sol =
        toda_solution_from_v(2, {0.6, 1.1, 2.0}, black_hole_spectrum(2, mu_bar));
    std::vector<double> u_grid;
    for (int i = 0; i <= 100; ++i) u_grid.push_back(3.0 * i / 100.0);
    HFromToda h = h_from_toda(sol, {2, 2}, mu_bar, u_grid);
    PolyFit f1 = fit_polynomial(h.z, h.H[0], 2);
    PolyFit f2 = fit_polynomial(h.z, h.H[1], 2);
    CHECK(f1.max_error <= 1e-10);
    // The fitted coefficients must satisfy the closed-form relations with
    // the Bbar the chain was built from.
    A2ClosedForm cf = closed_form_a2(mu_bar, f1.coef[1], f2.coef[1]);
    CHECK(cf.p_second[0] == doctest::Approx(f1.coef[2]).epsilon(1e-8));
    CHECK(cf.p_second[1] == doctest::Approx(f2.coef[2]).epsilon(1e-8));
    CHECK(cf.bbar[0] == doctest::Approx(sol.B[0]).epsilon(1e-8));
    CHECK(cf.bbar[1] == doctest::Approx(sol.B[1]).epsilon(1e-8));
}

TEST_CASE("mirror-symmetric spectral coefficients land on the special branch") {
    // Palindromic v forces P_1 = P_2 = -2 mu, where the generic branch
    // denominator vanishes; the special solution takes over with
    // Bbar_1 + Bbar_2 = 4 mu^2.
    const double mu_bar = 1.0;
    TodaChainSolution sol =
        toda_solution_from_v(2, {1.3, 1.0, 1.3}, black_hole_spectrum(2, mu_bar));
    CHECK(sol.B[0] + sol.B[1] == doctest::Approx(4.0 * mu_bar * mu_bar).epsilon(1e-12));
    std::vector<double> u_grid;
    for (int i = 0; i <= 100; ++i) u_grid.push_back(3.0 * i / 100.0);
    HFromToda h = h_from_toda(sol, {2, 2}, mu_bar, u_grid);
    PolyFit f1 = fit_polynomial(h.z, h.H[0], 2);
    PolyFit f2 = fit_polynomial(h.z, h.H[1], 2);
    CHECK(f1.coef[1] == doctest::Approx(-2.0 * mu_bar).epsilon(1e-10));
    CHECK(f2.coef[1] == doctest::Approx(-2.0 * mu_bar).epsilon(1e-10));
    A2ClosedForm sp = closed_form_a2_special(mu_bar, sol.B[0], sol.B[1]);
    CHECK(sp.p_second[0] == doctest::Approx(f1.coef[2]).epsilon(1e-10));
    CHECK(sp.p_second[1] == doctest::Approx(f2.coef[2]).epsilon(1e-10));
}

TEST_CASE("folding the symplectic chain into the odd unitary one") {
    FoldMap fold = fold_c_to_a(1);
    CHECK(fold.a_rank == 3);
    CHECK(fold.to_a[0] == std::vector<int>{1});
    CHECK(fold.to_a[1] == std::vector<int>{0, 2});
    // Folded matrix equals the rank-2 symplectic Cartan matrix.
    QuasiCartan c2 = cartan_matrix(AlgebraFamily::C, 2);
    CHECK(fold.folded.entries == c2.entries);

    // Degrees inherited from the A-side: (3,4,3) -> (4,3).
    DegreeVector a3 = polynomial_degrees(cartan_matrix(AlgebraFamily::A, 3));
    CHECK(a3.n[fold.to_a[0][0]] == Rational(4));
    CHECK(a3.n[fold.to_a[1][1]] == Rational(3));

    for (int m = 2; m <= 3; ++m) {
        FoldMap f = fold_c_to_a(m);
        CHECK(f.folded.entries == cartan_matrix(AlgebraFamily::C, m + 1).entries);
    }
}

TEST_CASE("folded solve yields mirror-symmetric moduli that solve the C system") {
    FoldMap fold = fold_c_to_a(1);
    std::vector<double> bbar_c{-1.2, -0.7};
    std::vector<double> bbar_a = fold.expand_bbar(bbar_c);
    CHECK(bbar_a == std::vector<double>{-0.7, -1.2, -0.7});
    ModuliProblem pa = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 3), 1.0, bbar_a);
    ModuliSolution sol_a = solve_poly(pa);
    // Mirror charges force mirror moduli to coefficient precision.
    for (size_t k = 0; k < sol_a.h[0].p.size(); ++k)
        CHECK(sol_a.h[0].p[k] == doctest::Approx(sol_a.h[2].p[k]).epsilon(1e-12));
    std::vector<ModuliPolynomial> h_c = fold.extract_symmetric(sol_a.h, 1e-9);
    REQUIRE(h_c.size() == 2);
    CHECK(h_c[0].degree() == 4);
    CHECK(h_c[1].degree() == 3);
    ModuliProblem pc = make_moduli_problem(cartan_matrix(AlgebraFamily::C, 2), 1.0, bbar_c);
    CHECK(residual(h_c, pc, default_grid(pc, 300)) <= 1e-9);

    // Solving the C system directly agrees coefficientwise.
    ModuliSolution sol_c = solve_poly(pc);
    for (int k = 0; k < 4; ++k)
        CHECK(sol_c.h[0].p[k] == doctest::Approx(h_c[0].p[k]).epsilon(1e-9));
}

TEST_CASE("folding holds for the longer chains") {
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> b_d(-2.0, -0.4);
    for (int m = 2; m <= 3; ++m) {
        FoldMap fold = fold_c_to_a(m);
        std::vector<double> bbar_c(m + 1);
        for (double& b : bbar_c) b = b_d(rng);
        ModuliProblem pa = make_moduli_problem(
            cartan_matrix(AlgebraFamily::A, fold.a_rank), 1.0, fold.expand_bbar(bbar_c));
        ModuliSolution sol_a = solve_poly(pa);
        std::vector<ModuliPolynomial> h_c = fold.extract_symmetric(sol_a.h, 1e-9);
        ModuliProblem pc =
            make_moduli_problem(cartan_matrix(AlgebraFamily::C, m + 1), 1.0, bbar_c);
        CHECK(residual(h_c, pc, default_grid(pc, 200)) <= 1e-9);
    }
}

TEST_CASE("ODE integration reproduces polynomial moduli") {
    // Rank 1.
    ModuliProblem p1 = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 1), 1.0, {-3.0});
    ModuliSolution s1 = solve_poly(p1);
    OdeRun run1 = integrate_ode(p1, s1.slopes(), 0.45, 200);
    REQUIRE(run1.completed);
    for (size_t i = 0; i < run1.z.size(); ++i)
        CHECK(run1.H[0][i] == doctest::Approx(1.0 + run1.z[i]).epsilon(1e-9));

    // Rank 2.
    ModuliProblem p2 =
        make_moduli_problem(cartan_matrix(AlgebraFamily::A, 2), 1.0, {-2.5, -2.5});
    ModuliSolution s2 = solve_poly(p2);
    OdeRun run2 = integrate_ode(p2, s2.slopes(), 0.45, 200);
    REQUIRE(run2.completed);
    for (int s = 0; s < 2; ++s)
        for (size_t i = 0; i < run2.z.size(); ++i)
            CHECK(run2.H[s][i] == doctest::Approx(s2.h[s].eval(run2.z[i])).epsilon(1e-8));

    // Trivial charges, zero slopes: H stays at 1.
    ModuliProblem p0 = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 1), 1.0, {0.0});
    OdeRun run0 = integrate_ode(p0, {0.0}, 0.45, 50);
    for (double h : run0.H[0]) CHECK(h == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("integration guards") {
    ModuliProblem p = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 1), 1.0, {-3.0});
    CHECK_THROWS_AS(integrate_ode(p, {1.0}, 0.6, 50), Error);  // beyond the horizon
    CHECK_THROWS_WITH_AS(integrate_ode(p, {-9.0}, 0.45, 50),
                         doctest::Contains("positivity"), Error);
}

TEST_CASE("shooting recovers the polynomial slope") {
    ModuliProblem p = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 1), 1.0, {-3.0});
    ShootResult shot = shoot(p);
    CHECK(shot.slopes[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(shot.H0[0] == doctest::Approx(1.5).epsilon(1e-4));

    // Vanishing charges pull the slopes to zero.
    ModuliProblem p0 = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 1), 1.0, {-1e-6});
    ShootResult shot0 = shoot(p0);
    CHECK(std::abs(shot0.slopes[0]) < 1e-3);
}

TEST_CASE("shooting solves the coupled rank-2 problem from an off-solution start") {
    // Couplings shift the true slopes away from the decoupled initial
    // guess, so the boundary root-finder has real work to do here.
    ModuliProblem p =
        make_moduli_problem(cartan_matrix(AlgebraFamily::A, 2), 1.0, {-2.5, -1.1});
    ModuliSolution sol = solve_poly(p);
    ShootResult shot = shoot(p);
    for (int s = 0; s < 2; ++s) {
        CHECK(std::abs(shot.slopes[s] - sol.h[s].p[0]) > 0.0); // genuinely solved
        CHECK(shot.slopes[s] == doctest::Approx(sol.h[s].p[0]).epsilon(1e-5));
        CHECK(shot.H0[s] == doctest::Approx(sol.h0(s)).epsilon(1e-4));
    }
}

TEST_CASE("shooting fails inside the non-existence window") {
    // Bbar > mu^2 leaves the quadratic without a real root; no bounded
    // trajectory reaches the horizon.
    ModuliProblem p = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 1), 1.0, {2.0});
    CHECK_THROWS_WITH_AS(shoot(p), doctest::Contains("non-existence"), Error);
}
