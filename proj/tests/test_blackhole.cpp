#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blackhole.hpp"
#include "config_json.hpp"
#include "toda_oracle.hpp"
#include "support.hpp"

using namespace tobra;

namespace {

BlackHoleSolution build_preset(const std::string& name, double mu, double q1, double q2) {
    BraneConfig config = preset(name).config;
    config.branes[0].charge = q1;
    config.branes[1].charge = q2;
    CouplingData coupling = scalar_products(config);
    const double d_bar = config.d_bar();
    std::vector<double> bbar(coupling.size);
    for (int s = 0; s < coupling.size; ++s)
        bbar[s] = coupling.K[s] * config.branes[s].epsilon *
                  config.branes[s].charge * config.branes[s].charge / (d_bar * d_bar);
    ModuliProblem problem = make_moduli_problem(*coupling.A, mu, bbar);
    ModuliSolution moduli = solve_poly(problem);
    return assemble_solution(config, coupling, moduli, mu);
}

} // namespace

TEST_CASE("membrane/fivebrane exponent table") {
    BlackHoleSolution sol = build_preset("m2m5_dyon", 1.0, 1.0, 1.0);
    // Conformal powers 2 h_s d(I_s)/(D-2): 1/3 and 2/3.
    CHECK(sol.exponent_table.at(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(sol.exponent_table.at(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    // Time block carries the extra -2 h_s.
    CHECK(sol.exponent_table.at(1, 0) == doctest::Approx(1.0 / 3 - 1.0).epsilon(1e-14));
    CHECK(sol.exponent_table.at(1, 1) == doctest::Approx(2.0 / 3 - 1.0).epsilon(1e-14));
    // Wrapped internal spaces: brane 1 wraps space 3, brane 2 wraps space 4.
    CHECK(sol.exponent_table.at(2, 0) == doctest::Approx(1.0 / 3 - 1.0).epsilon(1e-14));
    CHECK(sol.exponent_table.at(2, 1) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(sol.exponent_table.at(3, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(sol.exponent_table.at(3, 1) == doctest::Approx(2.0 / 3 - 1.0).epsilon(1e-14));
}

TEST_CASE("exponent table equals -2 h_s U^{si} on every factor space") {
    for (const std::string& name : preset_names()) {
        BlackHoleSolution sol = build_preset(name, 1.0, 1.0, 1.3);
        const int n = sol.config.n();
        for (int s = 0; s < sol.coupling.size; ++s) {
            std::vector<double> u_up = contravariant_u(sol.config, sol.config.branes[s]);
            for (int i = 0; i < n; ++i)
                CHECK(sol.exponent_table.at(i, s) ==
                      doctest::Approx(-2.0 * sol.coupling.h[s] * u_up[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("kk dyon conformal factor and scalar exponents") {
    BlackHoleSolution sol = build_preset("kk_dyon", 1.0, 1.0, 1.0);
    CHECK(sol.exponent_table.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.exponent_table.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    // exp(phi) = H_1^{lambda/2} H_2^{-lambda/2}.
    const double lambda = -std::sqrt(1.5);
    CHECK(sol.scalar_exponents.at(0, 0) == doctest::Approx(lambda / 2).epsilon(1e-12));
    CHECK(sol.scalar_exponents.at(1, 0) == doctest::Approx(-lambda / 2).epsilon(1e-12));
}

TEST_CASE("vacuum configuration gives the Tangherlini values") {
    BraneConfig config;
    config.dims = {2, 1};
    config.h_metric = MatD(0, 0);
    CouplingData coupling = scalar_products(config);
    ModuliSolution moduli;
    moduli.mu = 0.5;
    BlackHoleSolution sol = assemble_solution(config, coupling, moduli, 0.5);
    CHECK(sol.exponent_table.cols() == 0);
    CHECK(sol.T_H == 1.0 / (4.0 * std::numbers::pi));
    // Metric blocks carry no moduli factors.
    CHECK(metric_coefficient(sol, MetricBlock::sphere, 0, 0.3) == 1.0);
    CHECK(metric_coefficient(sol, MetricBlock::factor, 2, 0.3) ==
          doctest::Approx(1.0 - 2.0 * 0.5 * 0.3).epsilon(1e-15));
}

TEST_CASE("metric coefficients follow the exponent table") {
    BlackHoleSolution sol = build_preset("m2m5_dyon", 1.0, 1.0, 1.0);
    const double z = 0.21;
    const double f = 1.0 - 2.0 * z;
    const double h1 = sol.moduli.h[0].eval(z);
    const double h2 = sol.moduli.h[1].eval(z);
    const double conf = std::pow(h1, 1.0 / 3) * std::pow(h2, 2.0 / 3);
    CHECK(metric_coefficient(sol, MetricBlock::sphere, 0, z) ==
          doctest::Approx(conf).epsilon(1e-13));
    CHECK(metric_coefficient(sol, MetricBlock::radial, 0, z) ==
          doctest::Approx(conf / f).epsilon(1e-13));
    CHECK(metric_coefficient(sol, MetricBlock::factor, 2, z) ==
          doctest::Approx(conf * f / (h1 * h2)).epsilon(1e-13));
    CHECK(metric_coefficient(sol, MetricBlock::factor, 3, z) ==
          doctest::Approx(conf / h1).epsilon(1e-13));
    CHECK(metric_coefficient(sol, MetricBlock::factor, 4, z) ==
          doctest::Approx(conf / h2).epsilon(1e-13));
}

TEST_CASE("form amplitudes") {
    BlackHoleSolution sol = build_preset("m2m5_dyon", 1.0, 1.2, 0.9);
    const double z = 0.17;
    // Electric: -Q R^{-d_1} H_1^{-2} H_2 with R = z^{-1} here (dbar = 1).
    const double h1 = sol.moduli.h[0].eval(z);
    const double h2 = sol.moduli.h[1].eval(z);
    const double expected = -1.2 * z * z * std::pow(h1, -2.0) * h2;
    CHECK(form_amplitude(sol, 0, z) == doctest::Approx(expected).epsilon(1e-13));
    // Magnetic: the constant charge.
    CHECK(form_amplitude(sol, 1, z) == 0.9);
}

TEST_CASE("Hawking temperature values and structure") {
    // One-brane configuration with K = 2 (the kk coupling), d_1 = 2,
    // mu = 1/2: T_H = (1/(4 pi)) (1 + P)^{-1/2}.
    BraneConfig config = preset("kk_dyon").config;
    config.branes.resize(1);
    config.preset_name.reset();
    CouplingData coupling = scalar_products(config);
    REQUIRE(coupling.K[0] == doctest::Approx(2.0).epsilon(1e-12));
    const double mu = 0.5;
    std::vector<double> bbar{-2.0}; // K eps Q^2 with Q = 1
    ModuliProblem problem = make_moduli_problem(*coupling.A, mu, bbar);
    ModuliSolution moduli = solve_poly(problem);
    BlackHoleSolution sol = assemble_solution(config, coupling, moduli, mu);
    const double p = moduli.h[0].p[0];
    CHECK(sol.T_H ==
          doctest::Approx(1.0 / (4.0 * std::numbers::pi) * std::pow(1.0 + p, -0.5))
              .epsilon(1e-14));

    // mu-scaling of the prefactor: T(lambda mu) rebuilt from re-solved
    // horizon values carries lambda^{-1/dbar}.
    for (double lambda : {2.0, 5.0}) {
        BlackHoleSolution scaled = build_preset("m2m5_dyon", lambda * 1.0, 1.0, 1.0);
        const double expected = std::pow(lambda, -1.0) *
                                hawking_temperature(1.0, 1.0, scaled.H0, scaled.coupling.h);
        CHECK(scaled.T_H == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("temperature decreases in every horizon value") {
    std::mt19937 rng(test_seed());
    std::uniform_real_distribution<double> h0_d(0.5, 3.0);
    const std::vector<double> h{0.5, 0.7, 1.3};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> H0{h0_d(rng), h0_d(rng), h0_d(rng)};
        const double base = hawking_temperature(1.0, 1.0, H0, h);
        for (size_t s = 0; s < H0.size(); ++s) {
            std::vector<double> bumped = H0;
            bumped[s] *= 1.01;
            CHECK(hawking_temperature(1.0, 1.0, bumped, h) < base);
        }
    }
}

TEST_CASE("existence verdicts") {
    BraneConfig config = preset("m2m5_dyon").config;
    CouplingData coupling = scalar_products(config);

    // Physical branch (eps = -1) is never excluded, any charge.
    for (double q : {0.1, 1.0, 10.0}) {
        config.branes[0].charge = q;
        config.branes[1].charge = q;
        ExistenceReport rep = existence_check(coupling, 1.0, config.branes);
        CHECK(rep.verdict == ExistenceVerdict::exists_candidate);
        CHECK(rep.E_TL == doctest::Approx(1.0).epsilon(1e-12)); // mu_bar^2 for h = 1/2
    }

    // eps = +1 with large charge falls in the excluded window.
    BraneConfig flipped = preset("m2m5_dyon").config;
    flipped.branes[0].epsilon = 1;
    flipped.branes[1].epsilon = 1;
    flipped.branes[0].charge = 3.0;
    flipped.branes[1].charge = 3.0;
    ExistenceReport rep = existence_check(coupling, 1.0, flipped.branes);
    CHECK(rep.verdict == ExistenceVerdict::excluded);
    CHECK(rep.charge_sum == doctest::Approx(9.0).epsilon(1e-15));

    // Rescaling Q -> lambda Q, mu_bar -> lambda mu_bar leaves the verdict.
    for (double lambda : {0.5, 2.0, 7.0}) {
        BraneConfig scaled = flipped;
        for (Brane& b : scaled.branes) b.charge *= lambda;
        ExistenceReport r2 = existence_check(coupling, lambda, scaled.branes);
        CHECK(r2.verdict == ExistenceVerdict::excluded);
        CHECK(r2.E_TL == doctest::Approx(lambda * lambda * rep.E_TL).epsilon(1e-12));
        CHECK(r2.charge_sum == doctest::Approx(lambda * lambda * rep.charge_sum).epsilon(1e-12));
    }

    // Exact boundary: one brane, h = 1/2, E_TL = mu_bar^2/4 = eps Q^2/2.
    CouplingData one;
    one.size = 1;
    one.B = MatD(1, 1);
    one.B.at(0, 0) = 2.0;
    one.K = {2.0};
    one.h = {0.5};
    one.A_float = MatD(1, 1);
    one.A_float.at(0, 0) = 2.0;
    one.A = cartan_matrix(AlgebraFamily::A, 1);
    Brane b;
    b.epsilon = 1;
    b.charge = std::sqrt(2.0);
    ExistenceReport rb = existence_check(one, 2.0, {b});
    CHECK(rb.verdict == ExistenceVerdict::boundary);

    // Indefinite (h_s A_ss') withholds the verdict.
    CouplingData indef;
    indef.size = 2;
    indef.B = MatD(2, 2);
    indef.B.at(0, 0) = 2.0;
    indef.B.at(0, 1) = 3.0;
    indef.B.at(1, 0) = 3.0;
    indef.B.at(1, 1) = 2.0;
    indef.K = {2.0, 2.0};
    indef.h = {0.5, 0.5};
    indef.A_float = indef.B;
    Brane c;
    c.epsilon = 1;
    c.charge = 1.0;
    ExistenceReport rw = existence_check(indef, 1.0, {c, c});
    CHECK(rw.verdict == ExistenceVerdict::withheld);
}

TEST_CASE("preset coupling expectations") {
    for (const std::string& name : preset_names()) {
        Preset p = preset(name);
        CouplingData cd = scalar_products(p.config);
        REQUIRE(cd.size == p.expected.size);
        for (int s = 0; s < 2; ++s) {
            CHECK(cd.K[s] == doctest::Approx(p.expected.K[s]).epsilon(1e-12));
            for (int t = 0; t < 2; ++t)
                CHECK(cd.B.at(s, t) == doctest::Approx(p.expected.B.at(s, t)).epsilon(1e-12));
        }
        REQUIRE(cd.A.has_value());
        CHECK(cd.A->entries == p.expected.A->entries);
        CHECK(*cd.A->algebra_tag == "A2");
        CHECK(cd.degrees.n[0] == Rational(2));
    }
    // The kk coupling product lambda.lambda = 3/2 enters with opposite
    // chi signs.
    BraneConfig kk = preset("kk_dyon").config;
    const double ll = kk.branes[0].lambda[0] * kk.branes[1].lambda[0];
    CHECK(ll == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(preset("no_such_preset"), Error);
}

TEST_CASE("equal charges collapse the dyon to one square modulus") {
    BlackHoleSolution sol = build_preset("m2m5_dyon", 1.0, 1.0, 1.0);
    REQUIRE(sol.moduli.h.size() == 2);
    for (int k = 0; k < 2; ++k)
        CHECK(sol.moduli.h[0].p[k] == doctest::Approx(sol.moduli.h[1].p[k]).epsilon(1e-12));
    // H = (1 + P z/...)^2: the quadratic coefficient is the square of half
    // the linear one.
    const double p1 = sol.moduli.h[0].p[0];
    CHECK(sol.moduli.h[0].p[1] == doctest::Approx(p1 * p1 / 4.0).epsilon(1e-11));
}

TEST_CASE("five-dimensional lift") {
    BlackHoleSolution dyon = build_preset("kk_dyon", 1.0, 1.0, 1.0);
    KkLift lift = kk_lift(dyon);
    CHECK(lift.regime == "dyon");
    const double z = 0.31;
    CHECK(lift.four_block(z) == doctest::Approx(dyon.moduli.h[1].eval(z)).epsilon(1e-14));
    // Equal charges: H_1 = H_2, fifth-direction block flattens to 1.
    CHECK(lift.fifth_block(z) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(lift.phi(z) == doctest::Approx(1.0).epsilon(1e-11));

    BlackHoleSolution electric = build_preset("kk_dyon", 1.0, 1.0, 1e-9);
    CHECK(kk_lift(electric).regime == "electric_only");
    BlackHoleSolution monopole = build_preset("kk_dyon", 1.0, 1e-9, 1.0);
    CHECK(kk_lift(monopole).regime == "magnetic_monopole");
    // phi tracks (H_2/H_1)^{1/2} in the asymmetric case.
    KkLift mlift = kk_lift(monopole);
    CHECK(mlift.phi(z) ==
          doctest::Approx(std::sqrt(monopole.moduli.h[1].eval(z) / monopole.moduli.h[0].eval(z)))
              .epsilon(1e-12));

    BlackHoleSolution wrong = build_preset("m2m5_dyon", 1.0, 1.0, 1.0);
    CHECK_THROWS_AS(kk_lift(wrong), Error);
}

TEST_CASE("assembly refuses branes without a common time line") {
    BraneConfig config = preset("m2m5_dyon").config;
    config.branes[0].index_set = {3};
    ModuliSolution moduli;
    moduli.mu = 1.0;
    moduli.h.resize(2);
    CouplingData fake;
    fake.size = 2;
    CHECK_THROWS_WITH_AS(assemble_solution(config, fake, moduli, 1.0),
                         doctest::Contains("time"), Error);
}

TEST_CASE("horizon values from an integration run match the polynomial limit") {
    ModuliProblem p = make_moduli_problem(cartan_matrix(AlgebraFamily::A, 2), 1.0,
                                          {-2.5, -1.4});
    ModuliSolution sol = solve_poly(p);
    const double z_h = p.z_horizon();
    const double delta = 1e-3 * z_h;
    OdeRun run = integrate_ode_at(p, sol.slopes(),
                                  {0.0, z_h - 3 * delta, z_h - 2 * delta, z_h - delta});
    std::vector<double> h0 = horizon_values_from_run(run, 1.0);
    for (int s = 0; s < 2; ++s)
        CHECK(h0[s] == doctest::Approx(sol.h0(s)).epsilon(1e-7));
    CHECK_THROWS_AS(horizon_values_from_run(run, 2.0), Error); // samples past 1/(2 mu)
}

TEST_CASE("end-to-end membrane/fivebrane pipeline against the oracle") {
    BlackHoleSolution sol = build_preset("m2m5_dyon", 1.0, 1.1, 0.8);
    // Intersection dimension 1 and the rank-2 matrix were already pinned;
    // here the solved moduli must agree with an independent integration.
    ModuliProblem problem = make_moduli_problem(*sol.coupling.A, sol.mu, sol.moduli.Bbar);
    OdeRun run = integrate_ode(problem, sol.moduli.slopes(), 0.45, 300);
    REQUIRE(run.completed);
    for (int s = 0; s < 2; ++s)
        for (size_t i = 0; i < run.z.size(); ++i)
            CHECK(run.H[s][i] ==
                  doctest::Approx(sol.moduli.h[s].eval(run.z[i])).epsilon(1e-8));
}
