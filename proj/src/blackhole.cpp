#include "blackhole.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tobra {

BlackHoleSolution assemble_solution(const BraneConfig& config, const CouplingData& coupling,
                                    const ModuliSolution& moduli, double mu) {
    RestrictionReport rr = check_restrictions(config);
    if (!rr.common_time_ok)
        fail(ErrorCode::invalid_input,
             "assembly refused: every brane must contain the time manifold (index 2)");
    if ((int)moduli.h.size() != coupling.size)
        fail(ErrorCode::invalid_input, "moduli set does not match the brane count");

    BlackHoleSolution sol;
    sol.config = config;
    sol.coupling = coupling;
    sol.moduli = moduli;
    sol.mu = mu;

    const int n = config.n();
    const int m = coupling.size;
    const int l = config.l();
    const int D = config.total_dim();

    sol.H0.resize(m);
    for (int s = 0; s < m; ++s) {
        sol.H0[s] = moduli.h[s].eval(1.0 / (2.0 * mu));
        if (!(sol.H0[s] > 0.0) || !std::isfinite(sol.H0[s]))
            fail(ErrorCode::domain_error,
                 "assembly refused: moduli function " + std::to_string(s + 1) +
                     " has no positive horizon value");
    }

    // Powers of H_s on each factor-space block: the common conformal power
    // 2 h_s d(I_s)/(D-2), an extra -2 h_s on time, and -2 h_s on the
    // internal spaces the brane wraps.
    sol.exponent_table = MatD(n, m);
    for (int s = 0; s < m; ++s) {
        const Brane& br = config.branes[s];
        const double conformal =
            2.0 * coupling.h[s] * config.dim_of(br.index_set) / double(D - 2);
        for (int i = 1; i <= n; ++i) {
            double e = conformal;
            if (i >= 2) {
                const bool wraps = std::find(br.index_set.begin(), br.index_set.end(), i) !=
                                   br.index_set.end();
                if (wraps) e -= 2.0 * coupling.h[s];
            }
            sol.exponent_table.at(i - 1, s) = e;
        }
    }

    sol.scalar_exponents = MatD(m, l);
    if (l > 0) {
        MatD h_inv = inverse(config.h_metric);
        for (int s = 0; s < m; ++s) {
            const Brane& br = config.branes[s];
            for (int al = 0; al < l; ++al) {
                double lam_up = 0.0;
                for (int be = 0; be < l; ++be) lam_up += h_inv.at(al, be) * br.lambda[be];
                sol.scalar_exponents.at(s, al) = coupling.h[s] * br.chi() * lam_up;
            }
        }
    }

    sol.T_H = hawking_temperature(sol);
    return sol;
}

double metric_coefficient(const BlackHoleSolution& sol, MetricBlock block, int factor_index,
                          double z) {
    const int m = sol.coupling.size;
    const double f = 1.0 - 2.0 * sol.mu * z;
    double conformal = 1.0;
    for (int s = 0; s < m; ++s)
        conformal *= std::pow(sol.moduli.h[s].eval(z), sol.exponent_table.at(0, s));
    switch (block) {
    case MetricBlock::radial:
        return conformal / f;
    case MetricBlock::sphere:
        return conformal;
    case MetricBlock::factor: {
        if (factor_index < 2 || factor_index > sol.config.n())
            fail(ErrorCode::invalid_input, "factor index out of range");
        double coef = 1.0;
        for (int s = 0; s < m; ++s)
            coef *= std::pow(sol.moduli.h[s].eval(z),
                             sol.exponent_table.at(factor_index - 1, s));
        if (factor_index == 2) coef *= f; // time block carries the horizon factor
        return coef;
    }
    }
    fail(ErrorCode::internal, "unreachable metric block");
}

double form_amplitude(const BlackHoleSolution& sol, int s, double z) {
    if (s < 0 || s >= sol.coupling.size)
        fail(ErrorCode::invalid_input, "brane index out of range");
    const Brane& br = sol.config.branes[s];
    if (br.type == BraneType::magnetic) return br.charge;
    if (z <= 0.0) fail(ErrorCode::domain_error, "electric amplitude needs z > 0");
    const double d1 = sol.config.dims[0];
    const double d_bar = sol.config.d_bar();
    const double r_pow = std::pow(z, d1 / d_bar); // R^{-d_1} with R = z^{-1/dbar}
    double prod = 1.0;
    for (int t = 0; t < sol.coupling.size; ++t)
        prod *= std::pow(sol.moduli.h[t].eval(z), -sol.coupling.A_float.at(s, t));
    return -br.charge * r_pow * prod;
}

double hawking_temperature(double d_bar, double mu, const std::vector<double>& H0,
                           const std::vector<double>& h) {
    if (H0.size() != h.size())
        fail(ErrorCode::invalid_input, "H0 and h must have the same length");
    double prod = 1.0;
    for (size_t s = 0; s < H0.size(); ++s) {
        if (!(H0[s] > 0.0))
            fail(ErrorCode::domain_error, "Hawking temperature needs positive horizon values");
        prod *= std::pow(H0[s], -h[s]);
    }
    return d_bar / (4.0 * std::numbers::pi * std::pow(2.0 * mu, 1.0 / d_bar)) * prod;
}

double hawking_temperature(const BlackHoleSolution& sol) {
    return hawking_temperature(double(sol.config.d_bar()), sol.mu, sol.H0, sol.coupling.h);
}

std::vector<double> horizon_values_from_run(const OdeRun& run, double mu) {
    if (run.z.size() < 3)
        fail(ErrorCode::invalid_input, "extrapolation needs at least three samples");
    const double z_h = 1.0 / (2.0 * mu);
    const size_t n = run.z.size();
    const double z0 = run.z[n - 3], z1 = run.z[n - 2], z2 = run.z[n - 1];
    if (!(z2 < z_h))
        fail(ErrorCode::invalid_input, "run samples must stay below the horizon value");
    const double l0 = (z_h - z1) * (z_h - z2) / ((z0 - z1) * (z0 - z2));
    const double l1 = (z_h - z0) * (z_h - z2) / ((z1 - z0) * (z1 - z2));
    const double l2 = (z_h - z0) * (z_h - z1) / ((z2 - z0) * (z2 - z1));
    std::vector<double> h0(run.H.size());
    for (size_t s = 0; s < run.H.size(); ++s) {
        h0[s] = l0 * run.H[s][n - 3] + l1 * run.H[s][n - 2] + l2 * run.H[s][n - 1];
        if (!(h0[s] > 0.0) || !std::isfinite(h0[s]))
            fail(ErrorCode::domain_error,
                 "extrapolated horizon value is not positive for function " +
                     std::to_string(s + 1));
    }
    return h0;
}

const char* existence_verdict_name(ExistenceVerdict v) {
    switch (v) {
    case ExistenceVerdict::exists_candidate: return "exists-candidate";
    case ExistenceVerdict::excluded: return "excluded";
    case ExistenceVerdict::boundary: return "boundary";
    case ExistenceVerdict::withheld: return "withheld";
    }
    return "unknown";
}

ExistenceReport existence_check(const CouplingData& coupling, double mu_bar,
                                const std::vector<Brane>& branes) {
    if ((int)branes.size() != coupling.size)
        fail(ErrorCode::invalid_input, "brane list does not match the coupling data");
    const int m = coupling.size;
    ExistenceReport rep;
    for (int s = 0; s < m; ++s)
        rep.charge_sum += 0.5 * branes[s].epsilon * branes[s].charge * branes[s].charge;

    MatD ha(m, m);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t)
            ha.at(s, t) = coupling.h[s] * coupling.A_float.at(s, t);
    if (m > 0 && !cholesky_spd(ha)) {
        rep.verdict = ExistenceVerdict::withheld;
        rep.note = "(h_s A_ss') is not positive-definite, the bound does not apply";
        return rep;
    }

    double inv_sum = 0.0;
    bool exact_done = false;
    if (coupling.A) {
        std::vector<Rational> h_rat;
        bool all_snap = true;
        for (int s = 0; s < m && all_snap; ++s) {
            std::optional<Rational> r = snap_to_rational(coupling.h[s], 1 << 20, 1e-9);
            if (!r) all_snap = false;
            else h_rat.push_back(*r);
        }
        if (all_snap) {
            RatMatrix inv = inverse_cartan(*coupling.A);
            Rational acc(0);
            for (int s = 0; s < m; ++s) {
                Rational row(0);
                for (int t = 0; t < m; ++t) row += inv.at(s, t);
                acc += row * h_rat[s];
            }
            inv_sum = acc.to_double();
            exact_done = true;
        }
    }
    if (!exact_done && m > 0) {
        MatD inv = inverse(coupling.A_float);
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t) inv_sum += coupling.h[s] * inv.at(s, t);
    }
    rep.E_TL = mu_bar * mu_bar * inv_sum;

    const double scale = std::max({1.0, std::abs(rep.E_TL), std::abs(rep.charge_sum)});
    if (m == 0) {
        rep.verdict = ExistenceVerdict::exists_candidate;
    } else if (std::abs(rep.charge_sum - rep.E_TL) <= 1e-12 * scale) {
        rep.verdict = ExistenceVerdict::boundary;
        rep.note = "charge sum sits exactly on the energy bound";
    } else if (rep.E_TL > 0.0 && rep.E_TL < rep.charge_sum) {
        rep.verdict = ExistenceVerdict::excluded;
        rep.note = "0 < E_TL < sum eps_s Q_s^2/2: no bounded solution exists here";
    } else {
        rep.verdict = ExistenceVerdict::exists_candidate;
    }
    return rep;
}

std::vector<std::string> preset_names() { return {"m2m5_dyon", "kk_dyon"}; }

Preset preset(const std::string& name) {
    Preset p;
    if (name == "m2m5_dyon") {
        // Electric membrane and magnetic fivebrane sharing the time line,
        // D = 11, no scalars.
        p.config.dims = {2, 1, 2, 5};
        p.config.h_metric = MatD(0, 0);
        Brane m2;
        m2.color = "F4";
        m2.type = BraneType::electric;
        m2.index_set = {2, 3};
        m2.epsilon = -1;
        m2.charge = 1.0;
        Brane m5 = m2;
        m5.type = BraneType::magnetic;
        m5.index_set = {2, 4};
        p.config.branes = {m2, m5};
        p.config.preset_name = "m2m5_dyon";
    } else if (name == "kk_dyon") {
        // 4d dilatonic dyon from 5d reduction; both branes live on the
        // time line with coupling -sqrt(3/2).
        p.config.dims = {2, 1};
        p.config.h_metric = MatD(1, 1);
        p.config.h_metric.at(0, 0) = 1.0;
        Brane el;
        el.color = "F2";
        el.type = BraneType::electric;
        el.index_set = {2};
        el.lambda = {-std::sqrt(1.5)};
        el.epsilon = -1;
        el.charge = 1.0;
        Brane mg = el;
        mg.type = BraneType::magnetic;
        p.config.branes = {el, mg};
        p.config.preset_name = "kk_dyon";
    } else {
        fail(ErrorCode::invalid_input, "unknown preset '" + name + "'");
    }

    // Pinned expectations for both dyons: K_s = 2 and the rank-2
    // tridiagonal matrix.
    CouplingData& e = p.expected;
    e.size = 2;
    e.B = MatD(2, 2);
    e.B.at(0, 0) = 2.0;
    e.B.at(0, 1) = -1.0;
    e.B.at(1, 0) = -1.0;
    e.B.at(1, 1) = 2.0;
    e.K = {2.0, 2.0};
    e.h = {0.5, 0.5};
    e.A_float = MatD(2, 2);
    e.A_float.at(0, 0) = 2.0;
    e.A_float.at(0, 1) = -1.0;
    e.A_float.at(1, 0) = -1.0;
    e.A_float.at(1, 1) = 2.0;
    e.A = cartan_matrix(AlgebraFamily::A, 2);
    RatMatrix b_rat(2, 2);
    b_rat.at(0, 0) = Rational(2);
    b_rat.at(0, 1) = Rational(-1);
    b_rat.at(1, 0) = Rational(-1);
    b_rat.at(1, 1) = Rational(2);
    e.B_rat = b_rat;
    e.degrees = polynomial_degrees(*e.A);
    e.degrees_exact = true;
    return p;
}

KkLift kk_lift(const BlackHoleSolution& sol) {
    if (!sol.config.preset_name || *sol.config.preset_name != "kk_dyon")
        fail(ErrorCode::invalid_input, "kk_lift applies only to the kk_dyon preset");
    KkLift lift;
    lift.h1 = sol.moduli.h[0];
    lift.h2 = sol.moduli.h[1];
    lift.mu = sol.mu;
    const double q1 = sol.config.branes[0].charge;
    const double q2 = sol.config.branes[1].charge;
    const double total = q1 * q1 + q2 * q2;
    if (q2 * q2 < 1e-12 * total) lift.regime = "electric_only";
    else if (q1 * q1 < 1e-12 * total) lift.regime = "magnetic_monopole";
    else lift.regime = "dyon";
    return lift;
}

} // namespace tobra
