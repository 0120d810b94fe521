#ifndef TOBRA_BLACKHOLE_HPP
#define TOBRA_BLACKHOLE_HPP

#include <string>
#include <vector>

#include "moduli_poly.hpp"
#include "sigma_model.hpp"
#include "toda_oracle.hpp"

namespace tobra {

// Assembled observable bundle for one black-hole configuration. Exponent
// rows follow the factor spaces; the extra F powers on the radial and time
// blocks are supplied by metric_coefficient.
struct BlackHoleSolution {
    BraneConfig config;
    CouplingData coupling;
    double mu{1.0};
    ModuliSolution moduli;
    MatD exponent_table;    // n x |S|: power of H_s multiplying g^i
    MatD scalar_exponents;  // |S| x l: h_s chi_s lambda^alpha
    std::vector<double> H0; // horizon values H_s(1/(2 mu))
    double T_H{0.0};

    double mu_bar() const { return mu * config.d_bar(); }
};

BlackHoleSolution assemble_solution(const BraneConfig& config, const CouplingData& coupling,
                                    const ModuliSolution& moduli, double mu);

// Metric blocks in the order of (2+d_1+...)-split: radial line, sphere,
// then the factor spaces i >= 2.
enum class MetricBlock { radial, sphere, factor };

// Coefficient multiplying dR^2 (block radial, includes 1/F), R^2 dOmega^2
// (sphere), -dt^2 (factor i=2, includes F) or g^i (factor i>=3).
double metric_coefficient(const BlackHoleSolution& sol, MetricBlock block, int factor_index,
                          double z);

// Form amplitude for brane s at z: -Q_s R^{-d_1} prod H^{-A_ss'} for an
// electric brane, the constant Q_s for a magnetic one.
double form_amplitude(const BlackHoleSolution& sol, int s, double z);

// T_H = (dbar / (4 pi (2 mu)^{1/dbar})) prod H_s0^{-h_s}.
double hawking_temperature(double d_bar, double mu, const std::vector<double>& H0,
                           const std::vector<double>& h);
double hawking_temperature(const BlackHoleSolution& sol);

// Horizon values from an integration run: polynomials evaluate at
// 1/(2 mu) directly, a run only reaches interior points, so the last
// three samples are extrapolated quadratically to the endpoint.
std::vector<double> horizon_values_from_run(const OdeRun& run, double mu);

enum class ExistenceVerdict { exists_candidate, excluded, boundary, withheld };

struct ExistenceReport {
    double E_TL{0.0};       // mu_bar^2 sum_ss' h_s A^{ss'}
    double charge_sum{0.0}; // sum_s eps_s Q_s^2 / 2
    ExistenceVerdict verdict{ExistenceVerdict::exists_candidate};
    std::string note;
};

// Non-existence window 0 < E_TL < charge_sum; meaningful only when
// (h_s A_ss') is positive-definite, otherwise the verdict is withheld.
ExistenceReport existence_check(const CouplingData& coupling, double mu_bar,
                                const std::vector<Brane>& branes);

const char* existence_verdict_name(ExistenceVerdict v);

struct Preset {
    BraneConfig config;
    CouplingData expected;
};

// Built-in dyon configurations: "m2m5_dyon" (membrane/fivebrane pair in
// D = 11) and "kk_dyon" (4d dilatonic dyon, lambda = -sqrt(3/2)).
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

struct KkLift {
    ModuliPolynomial h1, h2;
    double mu{1.0};
    std::string regime; // dyon, electric_only, magnetic_monopole

    // 5-metric pieces: H_2 on the 4d block, H_1/H_2 on the fifth
    // direction, and the scalar phi = (H_2/H_1)^{1/2}.
    double four_block(double z) const { return h2.eval(z); }
    double fifth_block(double z) const { return h1.eval(z) / h2.eval(z); }
    double phi(double z) const { return std::sqrt(h2.eval(z) / h1.eval(z)); }
};

// Only valid for solutions built from the kk_dyon preset.
KkLift kk_lift(const BlackHoleSolution& sol);

} // namespace tobra

#endif
