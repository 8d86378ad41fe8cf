// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: scenario validation, a single-eps pipeline pass,
// and the full eps-sweep with rate fits.
//
// Exit status: 0 pass, 1 run/acceptance failure, 2 usage/config error.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "layerlab/analysis.hpp"
#include "layerlab/config.hpp"

namespace fs = std::filesystem;
using namespace layerlab;

namespace {

int cmd_validate(const std::string& config_path) {
    RunConfig cfg = load_config(config_path);
    Scenario s = cfg.scenario();
    ValidationReport r = validate_scenario(s);

    std::printf("scenario: %s (L=%.6g, T=%.6g, c0=%.6g)\n", s.name.c_str(), s.L, s.T, s.c0);
    std::printf("density_ok: %s (min rho0 = %.12g)\n", r.density_ok ? "yes" : "no",
                r.density_min);
    std::printf("zero_order_ok: %s\n", r.zero_order_ok ? "yes" : "no");
    std::printf("periodicity_ok: %s\n", r.periodicity_ok ? "yes" : "no");
    for (int si = 0; si < 2; ++si) {
        const char* sd = si == 0 ? "lower" : "upper";
        std::printf("  %s wall: zero-order residuals u1 %.3e, u2 %.3e\n", sd,
                    r.zero_order_residual[si][0], r.zero_order_residual[si][1]);
        std::printf("  %s wall: first-order residual (eps->0) %.3e\n", sd,
                    r.first_order_residual[si]);
        std::printf("  %s wall: eps-defects |a''| %.3e, |lap b| %.3e\n", sd,
                    r.eps_defect_a[si], r.eps_defect_b[si]);
    }
    for (const auto& m : r.messages) std::printf("note: %s\n", m.c_str());

    // machine-readable block
    std::printf("csv,check,value\n");
    std::printf("csv,density_ok,%d\n", r.density_ok ? 1 : 0);
    std::printf("csv,zero_order_ok,%d\n", r.zero_order_ok ? 1 : 0);
    std::printf("csv,periodicity_ok,%d\n", r.periodicity_ok ? 1 : 0);
    for (int si = 0; si < 2; ++si) {
        const char* sd = si == 0 ? "lower" : "upper";
        std::printf("csv,zero_order_u1_%s,%s\n", sd, fmt17(r.zero_order_residual[si][0]).c_str());
        std::printf("csv,zero_order_u2_%s,%s\n", sd, fmt17(r.zero_order_residual[si][1]).c_str());
        std::printf("csv,first_order_%s,%s\n", sd, fmt17(r.first_order_residual[si]).c_str());
    }
    return r.ok() ? 0 : 1;
}

struct DumpSink {
    std::FILE* fu1 = nullptr;
    std::FILE* fu2 = nullptr;
    ~DumpSink() {
        if (fu1) std::fclose(fu1);
        if (fu2) std::fclose(fu2);
    }
};

int cmd_solve(const std::string& config_path, double eps, bool dump_fields) {
    RunConfig cfg = load_config(config_path);
    if (eps <= 0.0) throw ConfigError("--eps must be positive");
    Scenario s = cfg.scenario();
    ValidationReport vr = validate_scenario(s);
    if (!vr.ok()) {
        std::fprintf(stderr, "scenario failed validation; run `validate` for details\n");
        return 1;
    }
    fs::create_directories(cfg.output_dir);

    const GridPolicy& pol = cfg.sweep.policy;
    GridPtr ref = std::make_shared<Grid2D>(
        Grid2D::channel(pol.nx, uniform_nodes(9, 0.0, 1.0), s.L));
    EulerSolution euler_ref = solve_euler(s, ref, pol.stamps);
    auto zgrid =
        std::make_shared<HalfLineGrid>(HalfLineGrid::uniform(cfg.sweep.nZ, cfg.sweep.z_max));
    int nt_corr = (pol.stamps - 1) * pol.corrector_substeps;
    CorrectorOptions copt;
    CorrectorSet lower =
        solve_corrector(Side::lower, s, euler_ref, zgrid, pol.nx, nt_corr,
                        pol.corrector_substeps, copt);
    CorrectorSet upper =
        solve_corrector(Side::upper, s, euler_ref, zgrid, pol.nx, nt_corr,
                        pol.corrector_substeps, copt);

    // one pipeline leg, optionally with per-stamp dumps
    GridPtr grid = build_grid(pol, eps, s.L);
    int nt = pick_nt(pol, *grid, s.T);
    int stride = nt / (pol.stamps - 1);
    EulerSolution euler = solve_euler(s, grid, pol.stamps);
    Composer cmp(s, euler, lower, upper, eps, grid);
    StampAccumulator acc(s, cmp, cfg.sweep.delta);

    DumpSink dump;
    if (dump_fields || cfg.dump_fields) {
        std::string p1 = cfg.output_dir + "/fields_u1_" + fmt17(eps) + ".txt";
        std::string p2 = cfg.output_dir + "/fields_u2_" + fmt17(eps) + ".txt";
        dump.fu1 = std::fopen(p1.c_str(), "w");
        dump.fu2 = std::fopen(p2.c_str(), "w");
        if (!dump.fu1 || !dump.fu2) throw ConfigError("cannot open dump files");
    }

    ViscousOptions vopt;
    vopt.cfl = pol.cfl;
    vopt.min_layer_nodes = pol.min_layer_nodes;
    ViscousDiagnostics diag;
    auto u1_half = solve_viscous_u1(s, eps, grid, 2 * nt, 1, vopt, &diag);
    StampSink sink = [&](int k, const Field2D& u2, const Field1D& u1) {
        acc.on_stamp(k, u2, u1);
        if (dump.fu1) dump_field(dump.fu1, u1);
        if (dump.fu2) dump_field(dump.fu2, u2);
    };
    solve_viscous_u2(s, eps, u1_half, grid, nt, stride, vopt, &diag, &sink, false);
    ErrorReport rep = acc.finalize();
    rep.diag = diag;

    std::string out_csv = cfg.output_dir + "/errors_" + fmt17(eps) + ".csv";
    write_error_report_csv(out_csv, rep);
    std::printf("wrote %s\n", out_csv.c_str());
    for (int q = 0; q < Q_COUNT; ++q)
        std::printf("%-16s %s\n", quantity_name(q), fmt17(rep.value[q]).c_str());
    for (const auto& wmsg : diag.warnings) std::printf("warning: %s\n", wmsg.c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, bool report_only, int jobs) {
    RunConfig cfg = load_config(config_path);
    if (cfg.sweep.eps_list.empty())
        throw ConfigError("sweep requires a nonempty sweep.eps_list");
    if (jobs > 0) cfg.sweep.jobs = jobs;
    Scenario s = cfg.scenario();
    fs::create_directories(cfg.output_dir);

    SweepReport rep = run_sweep(s, cfg.sweep);

    write_sweep_csv(cfg.output_dir + "/sweep.csv", rep);
    write_fits_csv(cfg.output_dir + "/fits.csv", rep);
    write_rate_dat(cfg.output_dir, rep);
    write_weighted_csv(cfg.output_dir + "/weighted_lower.csv", rep.weighted_lower);
    write_weighted_csv(cfg.output_dir + "/weighted_upper.csv", rep.weighted_upper);
    for (const auto& r : rep.reports)
        write_error_report_csv(cfg.output_dir + "/errors_" + fmt17(r.epsilon) + ".csv", r);

    for (const auto& qf : rep.fits) {
        if (qf.valid)
            std::printf("fit %-16s slope %8.4f  R2 %.5f  (%d pts)\n", qf.name.c_str(),
                        qf.fit.slope, qf.fit.r2, qf.fit.n_points);
        else
            std::printf("fit %-16s unavailable\n", qf.name.c_str());
    }
    for (const auto& n : rep.notes) std::printf("note: %s\n", n.c_str());

    bool all_pass = true;
    for (const auto& b : acceptance_slope_checks(rep)) {
        std::printf("[%s] %s: %s\n", b.pass ? "PASS" : "FAIL", b.name.c_str(),
                    b.detail.c_str());
        all_pass = all_pass && b.pass;
    }
    if (report_only) return 0;
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-layer approximation laboratory for plane-parallel channel flow"};
    app.require_subcommand(1);

    std::string config_path;
    double eps = 0.0;
    bool dump_fields = false;
    bool report_only = false;
    int jobs = 0;

    auto* validate = app.add_subcommand("validate", "check scenario hypotheses");
    validate->add_option("config", config_path, "config file")->required();

    auto* solve = app.add_subcommand("solve", "run the pipeline for one eps");
    solve->add_option("config", config_path, "config file")->required();
    solve->add_option("--eps", eps, "viscosity")->required();
    solve->add_flag("--dump-fields", dump_fields, "write per-stamp field dumps");

    auto* sweep = app.add_subcommand("sweep", "run the eps sweep and rate fits");
    sweep->add_option("config", config_path, "config file")->required();
    sweep->add_flag("--report-only", report_only, "never fail on slope bars");
    sweep->add_option("--jobs", jobs, "worker pool size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (solve->parsed()) return cmd_solve(config_path, eps, dump_fields);
        if (sweep->parsed()) return cmd_sweep(config_path, report_only, jobs);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
