#include "tobra.h"

#include <cstring>
#include <string>

#include "blackhole.hpp"
#include "config_json.hpp"
#include "moduli_poly.hpp"
#include "sigma_model.hpp"
#include "toda_oracle.hpp"

using namespace tobra;

namespace {

thread_local std::string g_last_error;

tobra_status map_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_input: return TOBRA_E_INVALID;
    case ErrorCode::parse_error: return TOBRA_E_PARSE;
    case ErrorCode::degenerate: return TOBRA_E_DEGENERATE;
    case ErrorCode::domain_error: return TOBRA_E_DOMAIN;
    case ErrorCode::no_solution: return TOBRA_E_NO_SOLUTION;
    case ErrorCode::unsupported: return TOBRA_E_UNSUPPORTED;
    case ErrorCode::io_error: return TOBRA_E_IO;
    case ErrorCode::internal: return TOBRA_E_INTERNAL;
    }
    return TOBRA_E_INTERNAL;
}

template <typename Fn>
tobra_status guarded(Fn&& fn) {
    try {
        fn();
        return TOBRA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TOBRA_E_INTERNAL;
    }
}

ModuliProblem problem_from_config(const BraneConfig& config, const CouplingData& coupling,
                                  double mu) {
    if (!coupling.A)
        fail(ErrorCode::unsupported,
             "quasi-Cartan entries could not be certified as small rationals;"
             " the polynomial solve only applies to the exact layer");
    const double d_bar = config.d_bar();
    std::vector<double> bbar(coupling.size);
    for (int s = 0; s < coupling.size; ++s) {
        const Brane& br = config.branes[s];
        bbar[s] = coupling.K[s] * br.epsilon * br.charge * br.charge / (d_bar * d_bar);
    }
    return make_moduli_problem(*coupling.A, mu, bbar);
}

} // namespace

struct tobra_config {
    BraneConfig config;
};

struct tobra_coupling {
    BraneConfig config;
    CouplingData data;
    RestrictionReport restrictions;
    std::vector<IntersectionEntry> intersections;
};

struct tobra_solution {
    ModuliProblem problem;
    ModuliSolution solution;
};

struct tobra_report {
    BlackHoleSolution solution;
    ExistenceReport existence;
    bool has_kk{false};
    KkLift kk;
};

struct tobra_toda {
    TodaChainSolution chain;
};

extern "C" {

const char* tobra_version(void) { return "1.0.0"; }

const char* tobra_last_error(void) { return g_last_error.c_str(); }

tobra_status tobra_config_from_file(const char* path, tobra_config** out) {
    return guarded([&] {
        if (!path || !out) fail(ErrorCode::invalid_input, "null argument");
        *out = new tobra_config{config_from_json_file(path)};
    });
}

tobra_status tobra_config_from_text(const char* json_text, tobra_config** out) {
    return guarded([&] {
        if (!json_text || !out) fail(ErrorCode::invalid_input, "null argument");
        *out = new tobra_config{config_from_json_text(json_text)};
    });
}

tobra_status tobra_config_preset(const char* name, tobra_config** out) {
    return guarded([&] {
        if (!name || !out) fail(ErrorCode::invalid_input, "null argument");
        *out = new tobra_config{preset(name).config};
    });
}

void tobra_config_free(tobra_config* config) { delete config; }

int tobra_config_brane_count(const tobra_config* config) {
    return config ? int(config->config.branes.size()) : 0;
}

int tobra_config_factor_count(const tobra_config* config) {
    return config ? config->config.n() : 0;
}

int tobra_config_scalar_count(const tobra_config* config) {
    return config ? config->config.l() : 0;
}

int tobra_config_total_dim(const tobra_config* config) {
    return config ? config->config.total_dim() : 0;
}

int tobra_config_d_bar(const tobra_config* config) {
    return config ? config->config.d_bar() : 0;
}

double tobra_config_charge(const tobra_config* config, int brane_index) {
    if (!config || brane_index < 0 || brane_index >= (int)config->config.branes.size())
        return 0.0;
    return config->config.branes[brane_index].charge;
}

tobra_status tobra_config_set_charge(tobra_config* config, int brane_index, double charge) {
    return guarded([&] {
        if (!config) fail(ErrorCode::invalid_input, "null config");
        if (brane_index < 0 || brane_index >= (int)config->config.branes.size())
            fail(ErrorCode::invalid_input, "brane index out of range");
        if (charge == 0.0) fail(ErrorCode::invalid_input, "charge must be nonzero");
        config->config.branes[brane_index].charge = charge;
    });
}

tobra_status tobra_analyze(const tobra_config* config, tobra_coupling** out) {
    return guarded([&] {
        if (!config || !out) fail(ErrorCode::invalid_input, "null argument");
        auto* handle = new tobra_coupling;
        handle->config = config->config;
        try {
            handle->data = scalar_products(config->config);
            handle->restrictions = check_restrictions(config->config);
            handle->intersections = intersection_dims(config->config, handle->data);
        } catch (...) {
            delete handle;
            throw;
        }
        *out = handle;
    });
}

void tobra_coupling_free(tobra_coupling* coupling) { delete coupling; }

int tobra_coupling_size(const tobra_coupling* coupling) {
    return coupling ? coupling->data.size : 0;
}

tobra_status tobra_coupling_matrix(const tobra_coupling* coupling, int which, double* out) {
    return guarded([&] {
        if (!coupling || !out) fail(ErrorCode::invalid_input, "null argument");
        const int m = coupling->data.size;
        const MatD& src = which == TOBRA_MATRIX_B ? coupling->data.B : coupling->data.A_float;
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t) out[s * m + t] = src.at(s, t);
    });
}

tobra_status tobra_coupling_vector(const tobra_coupling* coupling, int which, double* out) {
    return guarded([&] {
        if (!coupling || !out) fail(ErrorCode::invalid_input, "null argument");
        const int m = coupling->data.size;
        for (int s = 0; s < m; ++s) {
            switch (which) {
            case TOBRA_VECTOR_K: out[s] = coupling->data.K[s]; break;
            case TOBRA_VECTOR_H: out[s] = coupling->data.h[s]; break;
            case TOBRA_VECTOR_DEGREES: out[s] = coupling->data.degrees.n[s].to_double(); break;
            default: fail(ErrorCode::invalid_input, "unknown vector selector");
            }
        }
    });
}

int tobra_coupling_degrees_integral(const tobra_coupling* coupling) {
    return coupling && coupling->data.degrees.all_positive_integers ? 1 : 0;
}

const char* tobra_coupling_algebra_tag(const tobra_coupling* coupling) {
    if (!coupling || !coupling->data.A || !coupling->data.A->algebra_tag) return nullptr;
    return coupling->data.A->algebra_tag->c_str();
}

int tobra_coupling_restriction_count(const tobra_coupling* coupling) {
    return coupling ? int(coupling->restrictions.findings.size()) : 0;
}

const char* tobra_coupling_restriction_code(const tobra_coupling* coupling, int i) {
    if (!coupling || i < 0 || i >= (int)coupling->restrictions.findings.size()) return nullptr;
    return coupling->restrictions.findings[i].code.c_str();
}

const char* tobra_coupling_restriction_message(const tobra_coupling* coupling, int i) {
    if (!coupling || i < 0 || i >= (int)coupling->restrictions.findings.size()) return nullptr;
    return coupling->restrictions.findings[i].message.c_str();
}

int tobra_coupling_restriction_fatal(const tobra_coupling* coupling, int i) {
    if (!coupling || i < 0 || i >= (int)coupling->restrictions.findings.size()) return 0;
    return coupling->restrictions.findings[i].fatal ? 1 : 0;
}

int tobra_coupling_common_time_ok(const tobra_coupling* coupling) {
    return coupling && coupling->restrictions.common_time_ok ? 1 : 0;
}

tobra_status tobra_coupling_intersection(const tobra_coupling* coupling, int s, int t,
                                         double* predicted, int* actual, int* consistent) {
    return guarded([&] {
        if (!coupling) fail(ErrorCode::invalid_input, "null coupling");
        for (const IntersectionEntry& e : coupling->intersections) {
            if (e.s == s && e.t == t) {
                if (predicted) *predicted = e.predicted;
                if (actual) *actual = e.actual;
                if (consistent) *consistent = e.consistent ? 1 : 0;
                return;
            }
        }
        fail(ErrorCode::invalid_input, "no intersection entry for this pair");
    });
}

tobra_status tobra_degrees(const char* algebra, double* out, int cap, int* count,
                           int* integral) {
    return guarded([&] {
        if (!algebra || !count) fail(ErrorCode::invalid_input, "null argument");
        std::optional<AlgebraTag> tag = parse_algebra_tag(algebra);
        if (!tag)
            fail(ErrorCode::invalid_input,
                 std::string("unknown algebra '") + algebra + "' (expected A<rank> or C<rank>)");
        DegreeVector deg = polynomial_degrees(cartan_matrix(*tag));
        *count = int(deg.n.size());
        if (integral) *integral = deg.all_positive_integers ? 1 : 0;
        if (out) {
            if (cap < *count) fail(ErrorCode::invalid_input, "output buffer too small");
            for (size_t i = 0; i < deg.n.size(); ++i) out[i] = deg.n[i].to_double();
        }
    });
}

tobra_status tobra_solve(const tobra_config* config, const tobra_solve_params* params,
                         tobra_solution** out) {
    return guarded([&] {
        if (!config || !params || !out) fail(ErrorCode::invalid_input, "null argument");
        CouplingData coupling = scalar_products(config->config);
        ModuliProblem problem = problem_from_config(config->config, coupling, params->mu);
        SolveOptions opts;
        if (params->newton_tol > 0.0) opts.newton_tol = params->newton_tol;
        if (params->overflow_tol > 0.0) opts.overflow_tol = params->overflow_tol;
        opts.probe_alternates = params->probe_alternates != 0;
        if (params->probe_seed != 0) opts.probe_seed = params->probe_seed;
        ModuliSolution sol = solve_poly(problem, opts);
        *out = new tobra_solution{std::move(problem), std::move(sol)};
    });
}

void tobra_solution_free(tobra_solution* solution) { delete solution; }

int tobra_solution_brane_count(const tobra_solution* solution) {
    return solution ? int(solution->solution.h.size()) : 0;
}

int tobra_solution_degree(const tobra_solution* solution, int s) {
    if (!solution || s < 0 || s >= (int)solution->solution.h.size()) return 0;
    return solution->solution.h[s].degree();
}

tobra_status tobra_solution_coefficients(const tobra_solution* solution, int s, double* out) {
    return guarded([&] {
        if (!solution || !out) fail(ErrorCode::invalid_input, "null argument");
        if (s < 0 || s >= (int)solution->solution.h.size())
            fail(ErrorCode::invalid_input, "brane index out of range");
        const auto& p = solution->solution.h[s].p;
        for (size_t k = 0; k < p.size(); ++k) out[k] = p[k];
    });
}

double tobra_solution_eval(const tobra_solution* solution, int s, double z) {
    if (!solution || s < 0 || s >= (int)solution->solution.h.size()) return 0.0;
    return solution->solution.h[s].eval(z);
}

double tobra_solution_h0(const tobra_solution* solution, int s) {
    if (!solution || s < 0 || s >= (int)solution->solution.h.size()) return 0.0;
    return solution->solution.h0(s);
}

double tobra_solution_mu(const tobra_solution* solution) {
    return solution ? solution->solution.mu : 0.0;
}

double tobra_solution_bbar(const tobra_solution* solution, int s) {
    if (!solution || s < 0 || s >= (int)solution->solution.Bbar.size()) return 0.0;
    return solution->solution.Bbar[s];
}

double tobra_solution_residual(const tobra_solution* solution) {
    return solution ? solution->solution.primary_residual : 0.0;
}

double tobra_solution_overflow(const tobra_solution* solution) {
    return solution ? solution->solution.overflow_residual : 0.0;
}

tobra_status tobra_solution_grid_residual(const tobra_solution* solution, int grid_points,
                                          double* out) {
    return guarded([&] {
        if (!solution || !out) fail(ErrorCode::invalid_input, "null argument");
        *out = residual(solution->solution.h, solution->problem,
                        default_grid(solution->problem, grid_points > 0 ? grid_points : 1000));
    });
}

int tobra_solution_alternate_count(const tobra_solution* solution) {
    return solution ? int(solution->solution.alternates.size()) : 0;
}

tobra_status tobra_verify(const tobra_config* config, double mu, int grid_points,
                          double z_end_fraction, double* max_discrepancy) {
    return guarded([&] {
        if (!config || !max_discrepancy) fail(ErrorCode::invalid_input, "null argument");
        if (grid_points < 2) grid_points = 1000;
        if (z_end_fraction <= 0.0 || z_end_fraction >= 1.0) z_end_fraction = 0.9;
        CouplingData coupling = scalar_products(config->config);
        ModuliProblem problem = problem_from_config(config->config, coupling, mu);
        ModuliSolution sol = solve_poly(problem);
        if (sol.h.empty()) {
            *max_discrepancy = 0.0;
            return;
        }
        OdeRun run = integrate_ode(problem, sol.slopes(), z_end_fraction * problem.z_horizon(),
                                   grid_points);
        double worst = 0.0;
        for (size_t s = 0; s < sol.h.size(); ++s)
            for (size_t i = 0; i < run.z.size(); ++i)
                worst = std::max(worst, std::abs(run.H[s][i] - sol.h[s].eval(run.z[i])));
        *max_discrepancy = worst;
    });
}

tobra_status tobra_report_build(const tobra_config* config, double mu, tobra_report** out) {
    return guarded([&] {
        if (!config || !out) fail(ErrorCode::invalid_input, "null argument");
        CouplingData coupling = scalar_products(config->config);
        ModuliSolution sol;
        if (coupling.size > 0) {
            ModuliProblem problem = problem_from_config(config->config, coupling, mu);
            sol = solve_poly(problem);
        } else {
            sol.mu = mu;
        }
        auto* handle = new tobra_report;
        try {
            handle->solution = assemble_solution(config->config, coupling, sol, mu);
            handle->existence = existence_check(coupling, mu * config->config.d_bar(),
                                                config->config.branes);
            if (config->config.preset_name && *config->config.preset_name == "kk_dyon") {
                handle->kk = kk_lift(handle->solution);
                handle->has_kk = true;
            }
        } catch (...) {
            delete handle;
            throw;
        }
        *out = handle;
    });
}

void tobra_report_free(tobra_report* report) { delete report; }

double tobra_report_temperature(const tobra_report* report) {
    return report ? report->solution.T_H : 0.0;
}

double tobra_report_h0(const tobra_report* report, int s) {
    if (!report || s < 0 || s >= (int)report->solution.H0.size()) return 0.0;
    return report->solution.H0[s];
}

double tobra_report_exponent(const tobra_report* report, int factor_index, int s) {
    if (!report) return 0.0;
    const MatD& t = report->solution.exponent_table;
    if (factor_index < 1 || factor_index > t.rows() || s < 0 || s >= t.cols()) return 0.0;
    return t.at(factor_index - 1, s);
}

double tobra_report_scalar_exponent(const tobra_report* report, int s, int alpha) {
    if (!report) return 0.0;
    const MatD& t = report->solution.scalar_exponents;
    if (s < 0 || s >= t.rows() || alpha < 0 || alpha >= t.cols()) return 0.0;
    return t.at(s, alpha);
}

tobra_status tobra_report_metric_coef(const tobra_report* report, int block, double z,
                                      double* out) {
    return guarded([&] {
        if (!report || !out) fail(ErrorCode::invalid_input, "null argument");
        if (block == 0)
            *out = metric_coefficient(report->solution, MetricBlock::radial, 0, z);
        else if (block == 1)
            *out = metric_coefficient(report->solution, MetricBlock::sphere, 0, z);
        else
            *out = metric_coefficient(report->solution, MetricBlock::factor, block, z);
    });
}

tobra_status tobra_report_form_amplitude(const tobra_report* report, int s, double z,
                                         double* out) {
    return guarded([&] {
        if (!report || !out) fail(ErrorCode::invalid_input, "null argument");
        *out = form_amplitude(report->solution, s, z);
    });
}

tobra_status tobra_report_existence(const tobra_report* report, double* e_tl,
                                    double* charge_sum, int* verdict) {
    return guarded([&] {
        if (!report) fail(ErrorCode::invalid_input, "null report");
        if (e_tl) *e_tl = report->existence.E_TL;
        if (charge_sum) *charge_sum = report->existence.charge_sum;
        if (verdict) *verdict = int(report->existence.verdict);
    });
}

const char* tobra_existence_verdict_name(int verdict) {
    return existence_verdict_name(ExistenceVerdict(verdict));
}

tobra_status tobra_report_kk_lift(const tobra_report* report, double z, double out3[3]) {
    return guarded([&] {
        if (!report || !out3) fail(ErrorCode::invalid_input, "null argument");
        if (!report->has_kk)
            fail(ErrorCode::invalid_input, "kk_lift applies only to the kk_dyon preset");
        out3[0] = report->kk.four_block(z);
        out3[1] = report->kk.fifth_block(z);
        out3[2] = report->kk.phi(z);
    });
}

const char* tobra_report_kk_regime(const tobra_report* report) {
    if (!report || !report->has_kk) return nullptr;
    return report->kk.regime.c_str();
}

tobra_status tobra_toda_build(int m, double mu_bar, const double* B, tobra_toda** out) {
    return guarded([&] {
        if (!out) fail(ErrorCode::invalid_input, "null argument");
        if (!B) {
            // Equal spectral coefficients: self-calibrating chain at the
            // energy bound.
            *out = new tobra_toda{black_hole_toda_equal_v(m, mu_bar)};
            return;
        }
        std::vector<double> bs(B, B + m);
        *out = new tobra_toda{black_hole_toda(m, mu_bar, bs)};
    });
}

void tobra_toda_free(tobra_toda* toda) { delete toda; }

int tobra_toda_m(const tobra_toda* toda) { return toda ? toda->chain.m : 0; }

tobra_status tobra_toda_q(const tobra_toda* toda, double u, double* q_out) {
    return guarded([&] {
        if (!toda || !q_out) fail(ErrorCode::invalid_input, "null argument");
        std::vector<double> q = anderson_q(toda->chain, u);
        for (size_t s = 0; s < q.size(); ++s) q_out[s] = q[s];
    });
}

tobra_status tobra_toda_energy(const tobra_toda* toda, double h, double* e_t, double* e_tl) {
    return guarded([&] {
        if (!toda) fail(ErrorCode::invalid_input, "null toda handle");
        TodaEnergy e = toda_energy(toda->chain, h);
        if (e_t) *e_t = e.E_T;
        if (e_tl) *e_tl = e.E_TL;
    });
}

} // extern "C"
