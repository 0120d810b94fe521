#include "sigma_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace tobra {

namespace {

constexpr double kCrossCheckTol = 1e-12;

// lambda.lambda' contracted with the inverse scalar-field metric.
double lambda_dot(const BraneConfig& config, const MatD& h_inv,
                  const Brane& a, const Brane& b) {
    double acc = 0.0;
    for (int al = 0; al < config.l(); ++al)
        for (int be = 0; be < config.l(); ++be)
            acc += h_inv.at(al, be) * a.lambda[al] * b.lambda[be];
    return acc;
}

int intersection_dim(const BraneConfig& config, const Brane& a, const Brane& b) {
    int acc = 0;
    for (int i : a.index_set)
        if (std::find(b.index_set.begin(), b.index_set.end(), i) != b.index_set.end())
            acc += config.dims[i - 1];
    return acc;
}

} // namespace

int BraneConfig::total_dim() const {
    int d = 1;
    for (int di : dims) d += di;
    return d;
}

int BraneConfig::dim_of(const std::vector<int>& index_set) const {
    int acc = 0;
    for (int i : index_set) acc += dims[i - 1];
    return acc;
}

void validate_config(const BraneConfig& config) {
    if (config.n() < 2)
        fail(ErrorCode::invalid_input, "config needs at least two factor spaces");
    if (config.dims[0] < 2)
        fail(ErrorCode::invalid_input, "factor space 1 must be a sphere with d_1 >= 2");
    if (config.dims[1] != 1)
        fail(ErrorCode::invalid_input, "factor space 2 must be the one-dimensional time manifold");
    for (int di : config.dims)
        if (di < 1) fail(ErrorCode::invalid_input, "factor-space dimensions must be positive");
    const int l = config.l();
    if (config.h_metric.rows() != config.h_metric.cols())
        fail(ErrorCode::invalid_input, "h_metric must be square");
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(config.h_metric.at(i, j) - config.h_metric.at(j, i)) > 1e-14)
                fail(ErrorCode::invalid_input, "h_metric must be symmetric");
    if (l > 0 && lu_factor(config.h_metric).singular)
        fail(ErrorCode::degenerate, "h_metric is degenerate");
    for (size_t s = 0; s < config.branes.size(); ++s) {
        const Brane& br = config.branes[s];
        std::ostringstream who;
        who << "brane " << s + 1 << " (" << br.color << ")";
        if (br.index_set.empty())
            fail(ErrorCode::invalid_input, who.str() + ": empty index set");
        std::set<int> seen;
        for (int i : br.index_set) {
            if (i == 1)
                fail(ErrorCode::invalid_input, who.str() + ": branes cannot live in factor space 1");
            if (i < 2 || i > config.n())
                fail(ErrorCode::invalid_input, who.str() + ": index set entry out of range");
            if (!seen.insert(i).second)
                fail(ErrorCode::invalid_input, who.str() + ": duplicate index set entry");
        }
        if (!std::is_sorted(br.index_set.begin(), br.index_set.end()))
            fail(ErrorCode::invalid_input, who.str() + ": index set must be sorted");
        if ((int)br.lambda.size() != l)
            fail(ErrorCode::invalid_input, who.str() + ": lambda length does not match h_metric");
        if (br.epsilon != 1 && br.epsilon != -1)
            fail(ErrorCode::invalid_input, who.str() + ": epsilon must be +1 or -1");
        if (br.charge == 0.0)
            fail(ErrorCode::invalid_input, who.str() + ": charge must be nonzero");
    }
}

TargetMetric target_metric(const BraneConfig& config) {
    const int n = config.n();
    const int D = config.total_dim();
    if (D == 2)
        fail(ErrorCode::degenerate, "total dimension D = 2 makes the target metric inverse singular");
    TargetMetric tm;
    tm.G = RatMatrix(n, n);
    tm.G_inv = RatMatrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            long long di = config.dims[i], dj = config.dims[j];
            tm.G.at(i, j) = Rational(i == j ? di : 0) - Rational(di * dj);
            tm.G_inv.at(i, j) = (i == j ? Rational(1, di) : Rational(0)) + Rational(1, 2 - D);
        }
    if (!(tm.G * tm.G_inv == RatMatrix::identity(n)))
        fail(ErrorCode::internal, "target metric inverse check failed");
    return tm;
}

UVectors build_u_vectors(const BraneConfig& config) {
    const int n = config.n();
    const int l = config.l();
    UVectors out;
    for (const Brane& br : config.branes) {
        UVector u;
        u.space.assign(n, Rational(0));
        for (int i : br.index_set) u.space[i - 1] = Rational(config.dims[i - 1]);
        u.scalar.assign(l, 0.0);
        for (int al = 0; al < l; ++al) u.scalar[al] = -br.chi() * br.lambda[al];
        out.brane.push_back(std::move(u));
    }
    out.curvature.space.assign(n, Rational(0));
    for (int i = 0; i < n; ++i)
        out.curvature.space[i] = Rational(config.dims[i] - (i == 0 ? 1 : 0));
    out.curvature.scalar.assign(l, 0.0);
    return out;
}

namespace {

// Space-block contraction sum_ij G^ij u_i v_j, exact.
Rational contract_space(const RatMatrix& g_inv, const UVector& u, const UVector& v) {
    Rational acc(0);
    const int n = g_inv.rows();
    for (int i = 0; i < n; ++i) {
        if (u.space[i].is_zero()) continue;
        for (int j = 0; j < n; ++j) {
            if (v.space[j].is_zero()) continue;
            acc += g_inv.at(i, j) * u.space[i] * v.space[j];
        }
    }
    return acc;
}

} // namespace

CouplingData scalar_products(const BraneConfig& config) {
    validate_config(config);
    const int m = int(config.branes.size());
    const int D = config.total_dim();
    TargetMetric tm = target_metric(config);
    UVectors uv = build_u_vectors(config);
    MatD h_inv = config.l() > 0 ? inverse(config.h_metric) : MatD(0, 0);

    if (m > config.n() + config.l())
        fail(ErrorCode::invalid_input,
             "number of branes exceeds n + l, so the U-vectors cannot be independent");

    // Orthogonality against the curvature covector, exact in the space block.
    for (int s = 0; s < m; ++s)
        if (!contract_space(tm.G_inv, uv.brane[s], uv.curvature).is_zero())
            fail(ErrorCode::internal, "(U^s, U^1) != 0; brane index sets touch factor space 1");

    CouplingData cd;
    cd.size = m;
    cd.B = MatD(m, m);
    bool rational_ok = true;
    RatMatrix b_rat(m, m);
    for (int s = 0; s < m; ++s) {
        for (int t = 0; t < m; ++t) {
            const Brane& bs = config.branes[s];
            const Brane& bt = config.branes[t];
            const double ll = config.l() > 0 ? lambda_dot(config, h_inv, bs, bt) : 0.0;
            // Closed formula for (U^s, U^s').
            const int d_cap = intersection_dim(config, bs, bt);
            const double ds = config.dim_of(bs.index_set);
            const double dt = config.dim_of(bt.index_set);
            const double formula = d_cap + ds * dt / double(2 - D) + bs.chi() * bt.chi() * ll;
            // Independent route: full target-metric contraction.
            const Rational space = contract_space(tm.G_inv, uv.brane[s], uv.brane[t]);
            double contract = space.to_double();
            for (int al = 0; al < config.l(); ++al)
                for (int be = 0; be < config.l(); ++be)
                    contract += h_inv.at(al, be) * uv.brane[s].scalar[al] * uv.brane[t].scalar[be];
            const double scale = std::max(1.0, std::max(std::abs(formula), std::abs(contract)));
            if (std::abs(formula - contract) > kCrossCheckTol * scale)
                fail(ErrorCode::internal, "scalar product routes disagree beyond tolerance");
            cd.B.at(s, t) = formula;
            if (rational_ok) {
                // Exact space part plus a snapped coupling product. Small
                // denominators only, so genuinely irrational products are
                // left alone rather than silently rationalized.
                std::optional<Rational> llr =
                    config.l() > 0 ? snap_to_rational(ll, 64, 1e-9) : Rational(0);
                if (!llr) rational_ok = false;
                else b_rat.at(s, t) = space + Rational(bs.chi() * bt.chi()) * *llr;
            }
        }
    }

    double b_scale = 1.0;
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) b_scale = std::max(b_scale, std::abs(cd.B.at(s, t)));
    for (int s = 0; s < m; ++s) {
        cd.K.push_back(cd.B.at(s, s));
        const bool zero = rational_ok ? b_rat.at(s, s).is_zero()
                                      : std::abs(cd.B.at(s, s)) <= 1e-12 * b_scale;
        if (zero)
            fail(ErrorCode::degenerate, "K_s = (U^s,U^s) vanishes for brane " + std::to_string(s + 1));
        cd.h.push_back(1.0 / cd.B.at(s, s));
    }

    cd.A_float = MatD(m, m);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t)
            cd.A_float.at(s, t) = 2.0 * cd.B.at(s, t) / cd.B.at(t, t);

    if (rational_ok) {
        if (b_rat.det().is_zero())
            fail(ErrorCode::degenerate, "matrix (U^s,U^s') is degenerate");
        RatMatrix a_rat(m, m);
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t)
                a_rat.at(s, t) = Rational(2) * b_rat.at(s, t) / b_rat.at(t, t);
        cd.B_rat = b_rat;
        cd.A = make_quasi_cartan(a_rat);
        cd.degrees = polynomial_degrees(*cd.A);
        cd.degrees_exact = true;
    } else {
        LuDecomposition lu = lu_factor(cd.B, 1e-12);
        if (lu.singular)
            fail(ErrorCode::degenerate, "matrix (U^s,U^s') is degenerate");
        MatD a_inv = inverse(cd.A_float);
        cd.degrees.n.resize(m);
        cd.degrees.all_positive_integers = false; // cannot certify without exact entries
        for (int s = 0; s < m; ++s) {
            double row = 0.0;
            for (int t = 0; t < m; ++t) row += a_inv.at(s, t);
            cd.degrees.n[s] = snap_to_rational(2.0 * row, 1000000, 1e-9).value_or(Rational(0));
        }
    }
    return cd;
}

std::vector<IntersectionEntry> intersection_dims(const BraneConfig& config,
                                                 const CouplingData& coupling,
                                                 const MatD* a_override) {
    const int m = int(config.branes.size());
    const int D = config.total_dim();
    const MatD& a = a_override ? *a_override : coupling.A_float;
    if (a.rows() != m || a.cols() != m)
        fail(ErrorCode::invalid_input, "quasi-Cartan override has the wrong size");
    MatD h_inv = config.l() > 0 ? inverse(config.h_metric) : MatD(0, 0);
    std::vector<IntersectionEntry> out;
    for (int s = 0; s < m; ++s) {
        for (int t = 0; t < m; ++t) {
            if (s == t) continue;
            const Brane& bs = config.branes[s];
            const Brane& bt = config.branes[t];
            const double ll = config.l() > 0 ? lambda_dot(config, h_inv, bs, bt) : 0.0;
            IntersectionEntry e;
            e.s = s;
            e.t = t;
            e.predicted = double(config.dim_of(bs.index_set)) * config.dim_of(bt.index_set) /
                              double(D - 2) -
                          bs.chi() * bt.chi() * ll + 0.5 * coupling.K[t] * a.at(s, t);
            e.actual = intersection_dim(config, bs, bt);
            if (std::abs(e.predicted - std::round(e.predicted)) > 1e-9)
                fail(ErrorCode::invalid_input,
                     "intersection rule predicts a non-integer dimension for branes " +
                         std::to_string(s + 1) + "," + std::to_string(t + 1));
            e.consistent = std::abs(e.predicted - e.actual) <= 1e-9;
            out.push_back(e);
        }
    }
    return out;
}

RestrictionReport check_restrictions(const BraneConfig& config) {
    RestrictionReport rep;
    // w1: one-dimensional factor spaces among i = 2..n (1-based factors).
    std::vector<int> w1;
    for (int i = 2; i <= config.n(); ++i)
        if (config.dims[i - 1] == 1) w1.push_back(i);

    auto same_color_type = [](const Brane& a, const Brane& b) {
        return a.color == b.color && a.type == b.type;
    };
    auto contains = [](const std::vector<int>& v, int x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };
    auto without = [](std::vector<int> v, int x) {
        v.erase(std::remove(v.begin(), v.end(), x), v.end());
        return v;
    };

    if (w1.size() >= 2) {
        for (size_t a = 0; a < config.branes.size(); ++a)
            for (size_t b = 0; b < config.branes.size(); ++b) {
                if (a == b || !same_color_type(config.branes[a], config.branes[b])) continue;
                for (int i : w1)
                    for (int j : w1) {
                        if (i >= j) continue;
                        const auto& I = config.branes[a].index_set;
                        const auto& J = config.branes[b].index_set;
                        if (contains(I, i) && contains(J, j) && without(I, i) == without(J, j)) {
                            rep.r1_ok = false;
                            std::ostringstream msg;
                            msg << "branes " << a + 1 << " and " << b + 1
                                << " swap one-dimensional spaces " << i << " and " << j;
                            rep.findings.push_back({"R1", msg.str(), false});
                        }
                    }
            }
    }

    if (!w1.empty()) {
        for (size_t a = 0; a < config.branes.size(); ++a)
            for (size_t b = 0; b < config.branes.size(); ++b) {
                const Brane& bm = config.branes[a];
                const Brane& be = config.branes[b];
                if (bm.type != BraneType::magnetic || be.type != BraneType::electric) continue;
                if (bm.color != be.color) continue;
                std::vector<int> complement;
                for (int i = 1; i <= config.n(); ++i)
                    if (!contains(bm.index_set, i)) complement.push_back(i);
                for (int i : w1) {
                    if (!contains(complement, i)) continue;
                    std::vector<int> rest = without(complement, i);
                    if (rest == be.index_set && !contains(be.index_set, i)) {
                        rep.r2_ok = false;
                        std::ostringstream msg;
                        msg << "magnetic brane " << a + 1 << " and electric brane " << b + 1
                            << " violate the complement rule through space " << i;
                        rep.findings.push_back({"R2", msg.str(), false});
                    }
                }
            }
    }

    for (size_t s = 0; s < config.branes.size(); ++s) {
        if (!contains(config.branes[s].index_set, 2)) {
            rep.common_time_ok = false;
            std::ostringstream msg;
            msg << "brane " << s + 1 << " does not contain the time manifold (index 2)";
            rep.findings.push_back({"COMMON_TIME", msg.str(), true});
        }
    }
    return rep;
}

std::vector<double> contravariant_u(const BraneConfig& config, const Brane& brane) {
    const int n = config.n();
    const int l = config.l();
    const int D = config.total_dim();
    const double d_brane = config.dim_of(brane.index_set);
    std::vector<double> u(n + l, 0.0);
    for (int i = 1; i <= n; ++i) {
        const bool in_set =
            std::find(brane.index_set.begin(), brane.index_set.end(), i) != brane.index_set.end();
        u[i - 1] = (in_set ? 1.0 : 0.0) - d_brane / double(D - 2);
    }
    if (l > 0) {
        MatD h_inv = inverse(config.h_metric);
        for (int al = 0; al < l; ++al) {
            double lam_up = 0.0;
            for (int be = 0; be < l; ++be) lam_up += h_inv.at(al, be) * brane.lambda[be];
            u[n + al] = -brane.chi() * lam_up;
        }
    }
    return u;
}

B0Parameters b0_parameters(const CouplingData& coupling, const BraneConfig& config) {
    RestrictionReport rep = check_restrictions(config);
    if (!rep.common_time_ok)
        fail(ErrorCode::invalid_input,
             "b0 parameters require all branes to share the time manifold");
    const int m = coupling.size;
    const int n = config.n();
    const int l = config.l();
    B0Parameters out;
    out.b0_s.resize(m);
    for (int s = 0; s < m; ++s) out.b0_s[s] = coupling.degrees.n[s].to_double();

    const double d1 = config.dims[0];
    const double h1 = d1 / (1.0 - d1);
    out.b0_A.assign(n + l, 0.0);
    out.b0_A[1] = -1.0;            // -delta^A_2 on the time component
    out.b0_A[0] += h1 * (-1.0 / d1); // h_1 U^{1A}
    for (int s = 0; s < m; ++s) {
        std::vector<double> u_up = contravariant_u(config, config.branes[s]);
        for (int a = 0; a < n + l; ++a)
            out.b0_A[a] += coupling.h[s] * out.b0_s[s] * u_up[a];
    }
    return out;
}

} // namespace tobra
