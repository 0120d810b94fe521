/*
 * tobra -- intersecting p-brane black holes from Toda-type moduli systems.
 *
 * C interface to the solver core: opaque handles, integer status codes,
 * thread-local error messages. All getters are cheap; the *_build and
 * tobra_solve calls do the numerical work.
 */
#ifndef TOBRA_H
#define TOBRA_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tobra_status {
    TOBRA_OK = 0,
    TOBRA_E_INVALID = 1,     /* malformed input or violated precondition */
    TOBRA_E_PARSE = 2,       /* config document does not parse */
    TOBRA_E_DEGENERATE = 3,  /* singular matrix / vanishing K_s */
    TOBRA_E_DOMAIN = 4,      /* evaluation outside the valid domain */
    TOBRA_E_NO_SOLUTION = 5, /* solver failed or no bounded trajectory */
    TOBRA_E_UNSUPPORTED = 6, /* outside the polynomial/oracle coverage */
    TOBRA_E_IO = 7,
    TOBRA_E_INTERNAL = 8
} tobra_status;

const char* tobra_version(void);

/* Message for the most recent failure on this thread. */
const char* tobra_last_error(void);

typedef struct tobra_config tobra_config;
typedef struct tobra_coupling tobra_coupling;
typedef struct tobra_solution tobra_solution;
typedef struct tobra_report tobra_report;
typedef struct tobra_toda tobra_toda;

/* ---- configuration ------------------------------------------------- */

tobra_status tobra_config_from_file(const char* path, tobra_config** out);
tobra_status tobra_config_from_text(const char* json_text, tobra_config** out);
tobra_status tobra_config_preset(const char* name, tobra_config** out);
void tobra_config_free(tobra_config* config);

int tobra_config_brane_count(const tobra_config* config);
int tobra_config_factor_count(const tobra_config* config);
int tobra_config_scalar_count(const tobra_config* config);
int tobra_config_total_dim(const tobra_config* config);
int tobra_config_d_bar(const tobra_config* config);
double tobra_config_charge(const tobra_config* config, int brane_index);
tobra_status tobra_config_set_charge(tobra_config* config, int brane_index, double charge);

/* ---- sigma-model analysis ------------------------------------------ */

tobra_status tobra_analyze(const tobra_config* config, tobra_coupling** out);
void tobra_coupling_free(tobra_coupling* coupling);

int tobra_coupling_size(const tobra_coupling* coupling);

enum { TOBRA_MATRIX_B = 0, TOBRA_MATRIX_A = 1 };
/* out must hold size*size doubles, row-major. */
tobra_status tobra_coupling_matrix(const tobra_coupling* coupling, int which, double* out);

enum { TOBRA_VECTOR_K = 0, TOBRA_VECTOR_H = 1, TOBRA_VECTOR_DEGREES = 2 };
/* out must hold size doubles. */
tobra_status tobra_coupling_vector(const tobra_coupling* coupling, int which, double* out);

/* 1 when every degree is a certified positive integer. */
int tobra_coupling_degrees_integral(const tobra_coupling* coupling);
/* Exact catalog tag such as "A2" or "A1+A1"; NULL when unmatched. */
const char* tobra_coupling_algebra_tag(const tobra_coupling* coupling);

int tobra_coupling_restriction_count(const tobra_coupling* coupling);
const char* tobra_coupling_restriction_code(const tobra_coupling* coupling, int i);
const char* tobra_coupling_restriction_message(const tobra_coupling* coupling, int i);
int tobra_coupling_restriction_fatal(const tobra_coupling* coupling, int i);
int tobra_coupling_common_time_ok(const tobra_coupling* coupling);

tobra_status tobra_coupling_intersection(const tobra_coupling* coupling, int s, int t,
                                         double* predicted, int* actual, int* consistent);

/* Degree vector straight from the catalog, e.g. "A3" -> 3 4 3.
 * Returns the count through *count; out may be NULL to query the size. */
tobra_status tobra_degrees(const char* algebra, double* out, int cap, int* count,
                           int* integral);

/* ---- moduli solve --------------------------------------------------- */

typedef struct tobra_solve_params {
    double mu;              /* > 0 */
    double newton_tol;      /* <= 0 for the default 1e-13 */
    double overflow_tol;    /* <= 0 for the default 1e-9 */
    int probe_alternates;   /* nonzero: search for extra Newton solutions */
    unsigned probe_seed;
} tobra_solve_params;

tobra_status tobra_solve(const tobra_config* config, const tobra_solve_params* params,
                         tobra_solution** out);
void tobra_solution_free(tobra_solution* solution);

int tobra_solution_brane_count(const tobra_solution* solution);
int tobra_solution_degree(const tobra_solution* solution, int s);
/* out must hold degree(s) doubles: P_s^(1..n_s). */
tobra_status tobra_solution_coefficients(const tobra_solution* solution, int s, double* out);
double tobra_solution_eval(const tobra_solution* solution, int s, double z);
double tobra_solution_h0(const tobra_solution* solution, int s);
double tobra_solution_mu(const tobra_solution* solution);
double tobra_solution_bbar(const tobra_solution* solution, int s);
double tobra_solution_residual(const tobra_solution* solution);
double tobra_solution_overflow(const tobra_solution* solution);
/* Pointwise defect of the moduli equation over an equispaced grid. */
tobra_status tobra_solution_grid_residual(const tobra_solution* solution, int grid_points,
                                          double* out);
int tobra_solution_alternate_count(const tobra_solution* solution);

/* Polynomial solve cross-checked against an adaptive Runge-Kutta run
 * seeded with the polynomial slopes; reports the max discrepancy up to
 * z_end_fraction * (1/(2 mu)) (defaults to 0.9 when <= 0). */
tobra_status tobra_verify(const tobra_config* config, double mu, int grid_points,
                          double z_end_fraction, double* max_discrepancy);

/* ---- black-hole report ---------------------------------------------- */

tobra_status tobra_report_build(const tobra_config* config, double mu, tobra_report** out);
void tobra_report_free(tobra_report* report);

double tobra_report_temperature(const tobra_report* report);
double tobra_report_h0(const tobra_report* report, int s);
/* Power of H_s multiplying the factor-space metric g^i, i = 1..n. */
double tobra_report_exponent(const tobra_report* report, int factor_index, int s);
double tobra_report_scalar_exponent(const tobra_report* report, int s, int alpha);

/* block 0: dR^2 coefficient (with 1/F); block 1: R^2 dOmega^2; block
 * i >= 2: factor space i (time block includes F). */
tobra_status tobra_report_metric_coef(const tobra_report* report, int block, double z,
                                      double* out);
tobra_status tobra_report_form_amplitude(const tobra_report* report, int s, double z,
                                         double* out);

enum {
    TOBRA_EXISTS_CANDIDATE = 0,
    TOBRA_EXCLUDED = 1,
    TOBRA_BOUNDARY = 2,
    TOBRA_WITHHELD = 3
};
tobra_status tobra_report_existence(const tobra_report* report, double* e_tl,
                                    double* charge_sum, int* verdict);
const char* tobra_existence_verdict_name(int verdict);

/* Five-dimensional lift; only for the kk_dyon preset. out3 receives the
 * 4d-block coefficient, the fifth-direction coefficient and the scalar. */
tobra_status tobra_report_kk_lift(const tobra_report* report, double z, double out3[3]);
/* "dyon", "electric_only" or "magnetic_monopole"; NULL for other presets. */
const char* tobra_report_kk_regime(const tobra_report* report);

/* ---- Toda chain ------------------------------------------------------ */

/* Exact chain with the horizon spectrum w_j = (2j - m - 2) mu_bar and
 * couplings B_s > 0 (NULL for all ones). */
tobra_status tobra_toda_build(int m, double mu_bar, const double* B, tobra_toda** out);
void tobra_toda_free(tobra_toda* toda);

int tobra_toda_m(const tobra_toda* toda);
/* q_out must hold m doubles. */
tobra_status tobra_toda_q(const tobra_toda* toda, double u, double* q_out);
tobra_status tobra_toda_energy(const tobra_toda* toda, double h, double* e_t, double* e_tl);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TOBRA_H */
