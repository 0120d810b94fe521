// Command-line front end for the tobra shared library. Everything here
// goes through the C API in tobra.h; the numerics live behind it.

#include <tobra.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Exit codes: 0 success, 1 validation failure, 2 solver failure, 3 I/O.
int exit_code_for(tobra_status status) {
    switch (status) {
    case TOBRA_OK: return 0;
    case TOBRA_E_IO: return 3;
    case TOBRA_E_NO_SOLUTION:
    case TOBRA_E_INTERNAL: return 2;
    default: return 1;
    }
}

[[noreturn]] void die(tobra_status status) {
    std::cerr << "error: " << tobra_last_error() << "\n";
    std::exit(exit_code_for(status));
}

void check(tobra_status status) {
    if (status != TOBRA_OK) die(status);
}

// Round-trip decimal formatting; cross-oracle comparisons at 1e-12 must
// survive serialization.
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

using ConfigPtr = std::unique_ptr<tobra_config, decltype(&tobra_config_free)>;
using CouplingPtr = std::unique_ptr<tobra_coupling, decltype(&tobra_coupling_free)>;
using SolutionPtr = std::unique_ptr<tobra_solution, decltype(&tobra_solution_free)>;
using ReportPtr = std::unique_ptr<tobra_report, decltype(&tobra_report_free)>;
using TodaPtr = std::unique_ptr<tobra_toda, decltype(&tobra_toda_free)>;

struct ConfigArgs {
    std::string config_path;
    std::string preset;
    double q1{0.0};
    double q2{0.0};
};

void add_config_options(CLI::App* cmd, ConfigArgs* args) {
    auto* file = cmd->add_option("--config", args->config_path, "configuration JSON file");
    auto* preset =
        cmd->add_option("--preset", args->preset, "built-in preset (m2m5_dyon, kk_dyon)");
    file->excludes(preset);
    cmd->add_option("--q1", args->q1, "charge of brane 1");
    cmd->add_option("--q2", args->q2, "charge of brane 2");
}

ConfigPtr load_config(const ConfigArgs& args) {
    tobra_config* raw = nullptr;
    if (!args.preset.empty())
        check(tobra_config_preset(args.preset.c_str(), &raw));
    else if (!args.config_path.empty())
        check(tobra_config_from_file(args.config_path.c_str(), &raw));
    else {
        std::cerr << "error: provide --config or --preset\n";
        std::exit(1);
    }
    ConfigPtr config(raw, tobra_config_free);
    if (args.q1 != 0.0) check(tobra_config_set_charge(config.get(), 0, args.q1));
    if (args.q2 != 0.0) check(tobra_config_set_charge(config.get(), 1, args.q2));
    return config;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write '" << path.string() << "'\n";
        std::exit(3);
    }
    return out;
}

void print_matrix(const std::string& label, const std::vector<double>& m, int size) {
    std::cout << label << ":\n";
    for (int s = 0; s < size; ++s) {
        std::cout << " ";
        for (int t = 0; t < size; ++t) std::cout << " " << fmt(m[s * size + t]);
        std::cout << "\n";
    }
}

SolutionPtr solve_for(const tobra_config* config, double mu, bool probe = false,
                      unsigned seed = 0) {
    tobra_solve_params params{};
    params.mu = mu;
    params.probe_alternates = probe ? 1 : 0;
    params.probe_seed = seed;
    tobra_solution* raw = nullptr;
    check(tobra_solve(config, &params, &raw));
    return SolutionPtr(raw, tobra_solution_free);
}

int cmd_analyze(const ConfigArgs& args) {
    ConfigPtr config = load_config(args);
    tobra_coupling* raw = nullptr;
    check(tobra_analyze(config.get(), &raw));
    CouplingPtr coupling(raw, tobra_coupling_free);

    const int m = tobra_coupling_size(coupling.get());
    std::cout << "factor spaces: " << tobra_config_factor_count(config.get())
              << "  D = " << tobra_config_total_dim(config.get())
              << "  dbar = " << tobra_config_d_bar(config.get()) << "\n";
    std::cout << "branes: " << m << "  scalars: " << tobra_config_scalar_count(config.get())
              << "\n";
    std::vector<double> mat(size_t(m) * m);
    check(tobra_coupling_matrix(coupling.get(), TOBRA_MATRIX_B, mat.data()));
    print_matrix("B matrix", mat, m);
    check(tobra_coupling_matrix(coupling.get(), TOBRA_MATRIX_A, mat.data()));
    print_matrix("quasi-Cartan A", mat, m);
    const char* tag = tobra_coupling_algebra_tag(coupling.get());
    std::cout << "algebra: " << (tag ? tag : "(no catalog match)") << "\n";

    std::vector<double> vec(m);
    auto print_vec = [&](const char* label, int which) {
        check(tobra_coupling_vector(coupling.get(), which, vec.data()));
        std::cout << label << ":";
        for (double v : vec) std::cout << " " << fmt(v);
        std::cout << "\n";
    };
    print_vec("K", TOBRA_VECTOR_K);
    print_vec("h", TOBRA_VECTOR_H);
    check(tobra_coupling_vector(coupling.get(), TOBRA_VECTOR_DEGREES, vec.data()));
    std::cout << "degrees:";
    for (double v : vec) std::cout << " " << fmt(v);
    std::cout << "  (integer: "
              << (tobra_coupling_degrees_integral(coupling.get()) ? "yes" : "no") << ")\n";

    if (m > 1) {
        std::cout << "intersections:\n";
        for (int s = 0; s < m; ++s)
            for (int t = s + 1; t < m; ++t) {
                double predicted = 0.0;
                int actual = 0, consistent = 0;
                check(tobra_coupling_intersection(coupling.get(), s, t, &predicted, &actual,
                                                  &consistent));
                std::cout << "  (" << s + 1 << "," << t + 1 << "): predicted "
                          << fmt(predicted) << " actual " << actual << " "
                          << (consistent ? "ok" : "MISMATCH") << "\n";
            }
    }

    const int findings = tobra_coupling_restriction_count(coupling.get());
    bool fatal = false;
    if (findings == 0) {
        std::cout << "restrictions: all satisfied\n";
    } else {
        std::cout << "restrictions:\n";
        for (int i = 0; i < findings; ++i) {
            const bool f = tobra_coupling_restriction_fatal(coupling.get(), i) != 0;
            fatal |= f;
            std::cout << "  [" << tobra_coupling_restriction_code(coupling.get(), i) << "] "
                      << tobra_coupling_restriction_message(coupling.get(), i)
                      << (f ? " (blocks black-hole assembly)" : "") << "\n";
        }
    }
    return fatal ? 1 : 0;
}

int cmd_degrees(const std::string& algebra) {
    int count = 0, integral = 0;
    check(tobra_degrees(algebra.c_str(), nullptr, 0, &count, &integral));
    std::vector<double> deg(count);
    check(tobra_degrees(algebra.c_str(), deg.data(), count, &count, &integral));
    for (int i = 0; i < count; ++i) {
        if (i) std::cout << " ";
        if (integral) std::cout << (long long)llround(deg[i]);
        else std::cout << fmt(deg[i]);
    }
    std::cout << "\n";
    return 0;
}

int cmd_solve(const ConfigArgs& args, double mu, int grid, const std::string& outdir,
              bool probe, unsigned seed) {
    ConfigPtr config = load_config(args);
    SolutionPtr sol = solve_for(config.get(), mu, probe, seed);

    const int m = tobra_solution_brane_count(sol.get());
    json doc;
    doc["mu"] = mu;
    json branes = json::array();
    std::vector<double> bbar;
    for (int s = 0; s < m; ++s) {
        const int degree = tobra_solution_degree(sol.get(), s);
        std::vector<double> coef(degree);
        check(tobra_solution_coefficients(sol.get(), s, coef.data()));
        json jb;
        jb["degree"] = degree;
        jb["coefficients"] = coef;
        branes.push_back(jb);
        bbar.push_back(tobra_solution_bbar(sol.get(), s));
    }
    doc["bbar"] = bbar;
    doc["branes"] = branes;
    doc["coefficient_residual"] = tobra_solution_residual(sol.get());
    doc["overflow_residual"] = tobra_solution_overflow(sol.get());
    double grid_res = 0.0;
    check(tobra_solution_grid_residual(sol.get(), 1000, &grid_res));
    doc["grid_residual"] = grid_res;

    fs::path dir(outdir);
    open_out(dir / "coefficients.json") << doc.dump(2) << "\n";

    std::ofstream csv = open_out(dir / "moduli.csv");
    csv << "z";
    for (int s = 0; s < m; ++s) csv << ",H_" << s + 1;
    csv << "\n";
    const double z_h = 1.0 / (2.0 * mu);
    for (int i = 0; i < grid; ++i) {
        const double z = z_h * double(i) / double(grid - 1);
        csv << fmt(z);
        for (int s = 0; s < m; ++s) csv << "," << fmt(tobra_solution_eval(sol.get(), s, z));
        csv << "\n";
    }

    std::cout << "solved " << m << " moduli polynomials (degrees";
    for (int s = 0; s < m; ++s) std::cout << " " << tobra_solution_degree(sol.get(), s);
    std::cout << ")\n";
    std::cout << "coefficient residual: " << fmt(tobra_solution_residual(sol.get())) << "\n";
    std::cout << "overflow residual: " << fmt(tobra_solution_overflow(sol.get())) << "\n";
    std::cout << "grid residual: " << fmt(grid_res) << "\n";
    std::cout << "H0:";
    for (int s = 0; s < m; ++s) std::cout << " " << fmt(tobra_solution_h0(sol.get(), s));
    std::cout << "\n";
    if (int alts = tobra_solution_alternate_count(sol.get()))
        std::cout << "alternate solutions found: " << alts << "\n";
    std::cout << "wrote " << (dir / "coefficients.json").string() << ", "
              << (dir / "moduli.csv").string() << "\n";
    return 0;
}

int cmd_verify(const ConfigArgs& args, double mu, int grid, double zfrac) {
    ConfigPtr config = load_config(args);
    double discrepancy = 0.0;
    check(tobra_verify(config.get(), mu, grid, zfrac, &discrepancy));
    std::cout << "polynomial vs Runge-Kutta max discrepancy: " << fmt(discrepancy) << "\n";
    return 0;
}

int cmd_report(const ConfigArgs& args, double mu, int grid, const std::string& outdir) {
    ConfigPtr config = load_config(args);
    tobra_report* raw = nullptr;
    check(tobra_report_build(config.get(), mu, &raw));
    ReportPtr report(raw, tobra_report_free);

    const int m = tobra_config_brane_count(config.get());
    const int n = tobra_config_factor_count(config.get());
    const int l = tobra_config_scalar_count(config.get());
    const int d_bar = tobra_config_d_bar(config.get());

    std::cout << "T_H = " << fmt(tobra_report_temperature(report.get())) << "\n";
    std::cout << "H0:";
    for (int s = 0; s < m; ++s) std::cout << " " << fmt(tobra_report_h0(report.get(), s));
    std::cout << "\n";
    if (m > 0) {
        std::cout << "exponent table (rows = factor spaces, columns = branes):\n";
        for (int i = 1; i <= n; ++i) {
            std::cout << "  g^" << i << ":";
            for (int s = 0; s < m; ++s)
                std::cout << " " << fmt(tobra_report_exponent(report.get(), i, s));
            std::cout << "\n";
        }
    }
    if (l > 0) {
        std::cout << "scalar exponents (rows = branes):\n";
        for (int s = 0; s < m; ++s) {
            std::cout << "  brane " << s + 1 << ":";
            for (int a = 0; a < l; ++a)
                std::cout << " " << fmt(tobra_report_scalar_exponent(report.get(), s, a));
            std::cout << "\n";
        }
    }
    double e_tl = 0.0, charge_sum = 0.0;
    int verdict = 0;
    check(tobra_report_existence(report.get(), &e_tl, &charge_sum, &verdict));
    std::cout << "existence: " << tobra_existence_verdict_name(verdict)
              << "  (E_TL = " << fmt(e_tl) << ", charge sum = " << fmt(charge_sum) << ")\n";

    fs::path dir(outdir);
    std::ofstream csv = open_out(dir / "metric.csv");
    csv << "z,R,radial,sphere";
    for (int i = 2; i <= n; ++i) csv << ",space_" << i;
    csv << "\n";
    const double z_h = 1.0 / (2.0 * mu);
    for (int k = 1; k <= grid; ++k) {
        const double z = z_h * double(k) / double(grid);
        const double r = std::pow(z, -1.0 / double(d_bar));
        csv << fmt(z) << "," << fmt(r);
        double coef = 0.0;
        check(tobra_report_metric_coef(report.get(), 0, z, &coef)); // dR^2 block
        csv << "," << fmt(coef);
        check(tobra_report_metric_coef(report.get(), 1, z, &coef)); // sphere block
        csv << "," << fmt(coef);
        for (int i = 2; i <= n; ++i) {
            check(tobra_report_metric_coef(report.get(), i, z, &coef));
            csv << "," << fmt(coef);
        }
        csv << "\n";
    }
    std::cout << "wrote " << (dir / "metric.csv").string() << "\n";

    if (const char* regime = tobra_report_kk_regime(report.get())) {
        std::cout << "kk lift regime: " << regime << "\n";
        std::ofstream kk = open_out(dir / "kk5.csv");
        kk << "z,R,four_block,fifth_block,phi\n";
        for (int k = 1; k <= grid; ++k) {
            const double z = z_h * double(k) / double(grid);
            const double r = std::pow(z, -1.0 / double(d_bar));
            double vals[3] = {0, 0, 0};
            check(tobra_report_kk_lift(report.get(), z, vals));
            kk << fmt(z) << "," << fmt(r) << "," << fmt(vals[0]) << "," << fmt(vals[1]) << ","
               << fmt(vals[2]) << "\n";
        }
        std::cout << "wrote " << (dir / "kk5.csv").string() << "\n";
    }
    return 0;
}

int cmd_toda(int m, double mu_bar, double umax, int grid, const std::string& outdir) {
    tobra_toda* raw = nullptr;
    check(tobra_toda_build(m, mu_bar, nullptr, &raw));
    TodaPtr toda(raw, tobra_toda_free);

    fs::path dir(outdir);
    std::ofstream csv = open_out(dir / "toda.csv");
    csv << "u";
    for (int s = 1; s <= m; ++s) csv << ",q_" << s;
    csv << "\n";
    std::vector<double> q(m);
    for (int i = 0; i < grid; ++i) {
        const double u = umax * double(i) / double(grid - 1);
        check(tobra_toda_q(toda.get(), u, q.data()));
        csv << fmt(u);
        for (int s = 0; s < m; ++s) csv << "," << fmt(q[s]);
        csv << "\n";
    }
    double e_t = 0.0, e_tl = 0.0;
    check(tobra_toda_energy(toda.get(), 1.0, &e_t, &e_tl));
    std::cout << "E_T = " << fmt(e_t) << "\n";
    std::cout << "wrote " << (dir / "toda.csv").string() << "\n";
    return 0;
}

struct Range {
    double start{0.0}, stop{0.0};
    int count{1};
};

bool parse_range(const std::string& text, Range* out) {
    const size_t c1 = text.find(':');
    if (c1 == std::string::npos) return false;
    const size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) return false;
    try {
        out->start = std::stod(text.substr(0, c1));
        out->stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        out->count = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        return false;
    }
    return out->count >= 1;
}

int cmd_sweep(const ConfigArgs& args, const std::string& mu_spec, const std::string& q_spec,
              const std::string& out_path) {
    Range mu_range, q_range;
    const bool mu_sweep = parse_range(mu_spec, &mu_range);
    const bool q_sweep = parse_range(q_spec, &q_range);
    if (mu_sweep == q_sweep) {
        std::cerr << "error: sweep needs exactly one range, --mu a:b:n or --q a:b:n\n";
        return 1;
    }
    double mu_fixed = 1.0;
    if (!mu_sweep && !mu_spec.empty()) mu_fixed = std::stod(mu_spec);
    double q_fixed = 0.0;
    if (!q_sweep && !q_spec.empty()) q_fixed = std::stod(q_spec);

    ConfigPtr probe = load_config(args);
    const int m = tobra_config_brane_count(probe.get());

    std::ofstream csv = open_out(out_path);
    csv << (mu_sweep ? "mu" : "q") << ",T_H";
    for (int s = 0; s < m; ++s) csv << ",H0_" << s + 1;
    csv << ",grid_residual\n";

    const Range& range = mu_sweep ? mu_range : q_range;
    for (int i = 0; i < range.count; ++i) {
        const double t = range.count > 1 ? double(i) / double(range.count - 1) : 0.0;
        const double value = range.start + (range.stop - range.start) * t;
        ConfigPtr config = load_config(args);
        double mu = mu_sweep ? value : mu_fixed;
        if (!mu_sweep)
            for (int s = 0; s < m; ++s) check(tobra_config_set_charge(config.get(), s, value));
        else if (q_fixed != 0.0)
            for (int s = 0; s < m; ++s) check(tobra_config_set_charge(config.get(), s, q_fixed));

        SolutionPtr sol = solve_for(config.get(), mu);
        tobra_report* rraw = nullptr;
        check(tobra_report_build(config.get(), mu, &rraw));
        ReportPtr report(rraw, tobra_report_free);
        double grid_res = 0.0;
        check(tobra_solution_grid_residual(sol.get(), 1000, &grid_res));

        csv << fmt(value) << "," << fmt(tobra_report_temperature(report.get()));
        for (int s = 0; s < m; ++s) csv << "," << fmt(tobra_report_h0(report.get(), s));
        csv << "," << fmt(grid_res) << "\n";
    }
    std::cout << "wrote " << out_path << " (" << range.count << " rows)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"intersecting p-brane black holes from Toda-type moduli systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tobra_version()));

    ConfigArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "couplings, quasi-Cartan matrix, restrictions");
    add_config_options(analyze, &analyze_args);

    std::string algebra;
    auto* degrees = app.add_subcommand("degrees", "polynomial degree vector of a catalog algebra");
    degrees->add_option("--algebra", algebra, "algebra tag, e.g. A3 or C2")->required();

    ConfigArgs solve_args;
    double solve_mu = 1.0;
    int solve_grid = 201;
    std::string solve_outdir = ".";
    bool solve_probe = false;
    unsigned solve_seed = 0;
    auto* solve = app.add_subcommand("solve", "polynomial moduli functions");
    add_config_options(solve, &solve_args);
    solve->add_option("--mu", solve_mu, "extremality parameter (> 0)");
    solve->add_option("--grid", solve_grid, "CSV sample count");
    solve->add_option("--outdir", solve_outdir, "output directory");
    solve->add_flag("--probe-alternates", solve_probe, "search for extra Newton branches");
    solve->add_option("--seed", solve_seed, "seed for the alternate-branch probe");

    ConfigArgs verify_args;
    double verify_mu = 1.0, verify_zfrac = 0.9;
    int verify_grid = 1000;
    auto* verify = app.add_subcommand("verify", "cross-check polynomials against the ODE oracle");
    add_config_options(verify, &verify_args);
    verify->add_option("--mu", verify_mu, "extremality parameter (> 0)");
    verify->add_option("--grid", verify_grid, "comparison grid size");
    verify->add_option("--zfrac", verify_zfrac, "fraction of the horizon coordinate to cover");

    ConfigArgs report_args;
    double report_mu = 1.0;
    int report_grid = 200;
    std::string report_outdir = ".";
    auto* report = app.add_subcommand("report", "black-hole observables and metric coefficients");
    add_config_options(report, &report_args);
    report->add_option("--mu", report_mu, "extremality parameter (> 0)");
    report->add_option("--grid", report_grid, "CSV sample count");
    report->add_option("--outdir", report_outdir, "output directory");

    int toda_m = 2;
    double toda_mubar = 1.0, toda_umax = 5.0;
    int toda_grid = 201;
    std::string toda_outdir = ".";
    auto* toda = app.add_subcommand("toda", "exact Toda-chain trajectories q^s(u)");
    toda->add_option("--m", toda_m, "chain length");
    toda->add_option("--mubar", toda_mubar, "spectrum scale");
    toda->add_option("--umax", toda_umax, "trajectory endpoint");
    toda->add_option("--grid", toda_grid, "CSV sample count");
    toda->add_option("--outdir", toda_outdir, "output directory");

    ConfigArgs sweep_args;
    std::string sweep_mu, sweep_q, sweep_out = "sweep.csv";
    auto* sweep = app.add_subcommand("sweep", "parameter sweeps over mu or charge");
    add_config_options(sweep, &sweep_args);
    sweep->add_option("--mu", sweep_mu, "fixed value or range a:b:n");
    sweep->add_option("--q", sweep_q, "fixed value or range a:b:n (applies to all branes)");
    sweep->add_option("--out", sweep_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_args);
        if (degrees->parsed()) return cmd_degrees(algebra);
        if (solve->parsed())
            return cmd_solve(solve_args, solve_mu, solve_grid, solve_outdir, solve_probe,
                             solve_seed);
        if (verify->parsed()) return cmd_verify(verify_args, verify_mu, verify_grid, verify_zfrac);
        if (report->parsed()) return cmd_report(report_args, report_mu, report_grid, report_outdir);
        if (toda->parsed()) return cmd_toda(toda_m, toda_mubar, toda_umax, toda_grid, toda_outdir);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_mu, sweep_q, sweep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
