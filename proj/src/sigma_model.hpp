#ifndef TOBRA_SIGMA_MODEL_HPP
#define TOBRA_SIGMA_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "lie_cartan.hpp"
#include "linalg.hpp"
#include "rational.hpp"

namespace tobra {

enum class BraneType { electric, magnetic };

// One charged brane. Factor-space indices are 1-based as in the metric
// ansatz (index 1 = sphere, index 2 = time); branes never live in space 1.
// epsilon folds the sign of the restricted metric determinant and the
// form-field sign theta into a single user-supplied +-1.
struct Brane {
    std::string color;               // form-field label a_s
    BraneType type{BraneType::electric};
    std::vector<int> index_set;      // sorted subset of {2..n}
    std::vector<double> lambda;      // coupling vector, length l
    int epsilon{-1};
    double charge{1.0};

    int chi() const { return type == BraneType::electric ? 1 : -1; }
};

struct BraneConfig {
    std::vector<int> dims;           // d_1..d_n, d_1 >= 2 sphere, d_2 = 1 time
    MatD h_metric;                   // l x l symmetric nondegenerate
    std::vector<Brane> branes;
    std::optional<std::string> preset_name;

    int n() const { return int(dims.size()); }
    int l() const { return h_metric.rows(); }
    int total_dim() const; // D = 1 + sum d_i
    int d_bar() const { return dims[0] - 1; }
    int dim_of(const std::vector<int>& index_set) const;
};

// Throws invalid_input on a malformed config.
void validate_config(const BraneConfig& config);

struct TargetMetric {
    RatMatrix G;     // G_ij = d_i delta_ij - d_i d_j
    RatMatrix G_inv; // G^ij = delta^ij/d_i + 1/(2-D)
};

TargetMetric target_metric(const BraneConfig& config);

// Covector U_A with A = (i, alpha); the space block is exact.
struct UVector {
    std::vector<Rational> space;   // length n
    std::vector<double> scalar;    // length l
};

struct UVectors {
    std::vector<UVector> brane;    // one per brane
    UVector curvature;             // U^1
};

UVectors build_u_vectors(const BraneConfig& config);

struct CouplingData {
    int size{0};
    MatD B;                        // scalar products (U^s, U^s')
    std::vector<double> K;         // K_s = B_ss
    std::vector<double> h;         // h_s = 1/K_s
    MatD A_float;                  // 2 B_ss' / B_s's'
    // Exact layer: present when every lambda.lambda product snaps to a
    // small rational, which covers every catalog configuration.
    std::optional<RatMatrix> B_rat;
    std::optional<QuasiCartan> A;
    DegreeVector degrees;
    bool degrees_exact{false};
};

// Builds B both by the closed formula and by target-metric contraction,
// cross-checks the two, and verifies (U^s,U^1) = 0 and |S| <= n + l.
CouplingData scalar_products(const BraneConfig& config);

struct IntersectionEntry {
    int s{0}, t{0};
    double predicted{0.0};
    int actual{0};
    bool consistent{false};
};

// d(I_s cap I_s') from dimensions, couplings and the quasi-Cartan matrix,
// checked against the actual index-set intersections. With the derived
// matrix the rule is an identity; pass a_override to test a prescribed
// matrix against the configuration. A non-integer prediction throws.
std::vector<IntersectionEntry> intersection_dims(const BraneConfig& config,
                                                 const CouplingData& coupling,
                                                 const MatD* a_override = nullptr);

struct RestrictionFinding {
    std::string code;    // R1, R2, COMMON_TIME
    std::string message;
    bool fatal{false};   // only COMMON_TIME blocks black-hole assembly
};

struct RestrictionReport {
    std::vector<RestrictionFinding> findings;
    bool r1_ok{true};
    bool r2_ok{true};
    bool common_time_ok{true};
};

RestrictionReport check_restrictions(const BraneConfig& config);

struct B0Parameters {
    std::vector<double> b0_s;      // 2 sum_s' A^{ss'}, equals the degrees
    std::vector<double> b0_A;      // length n + l
};

B0Parameters b0_parameters(const CouplingData& coupling, const BraneConfig& config);

// Contravariant components U^{sA}; used by b0 assembly and the metric
// exponent tables.
std::vector<double> contravariant_u(const BraneConfig& config, const Brane& brane);

} // namespace tobra

#endif
