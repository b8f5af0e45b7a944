// Study runner CLI for the GDSW preconditioning toolkit: sweeps subdomain
// counts and sparse direct backends over the model problems and writes the
// timing tables, plus a condition-bound verification mode and a problem
// exporter.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gdsw/gdsw.hpp"

namespace {

struct CliOverrides {
    std::string config;
    std::string problem, cells, parts, backend, nullspace, coarse, method, bc;
    std::string out, format;
    double tol = -1.0;
    double h = -1.0;
    long long max_iter = -1, restart = -1, overlap = -1, repeats = -1;
    long long seed = -1, threads = -1;
    bool plotdata = false;
    std::string dump_components, dump_decomposition, dump_phi, residuals;
};

void add_common_flags(CLI::App* app, CliOverrides& o) {
    app->add_option("--config", o.config, "configuration file (TOML-style)");
    app->add_option("--problem", o.problem,
                    "laplace1d|laplace2d|laplace3d|elasticity3d");
    app->add_option("--cells", o.cells, "cells per axis, e.g. 16x16");
    app->add_option("--parts", o.parts, "sweep of parts per axis, e.g. 2x2,4x4");
    app->add_option("--overlap", o.overlap, "algebraic overlap layers");
    app->add_option("--backend", o.backend,
                    "comma list of dense-lu|sparse-lu-natural|sparse-lu-ordered");
    app->add_option("--nullspace", o.nullspace,
                    "one-dimensional|translations|translations-rotations");
    app->add_option("--coarse", o.coarse, "on|off second level");
    app->add_option("--method", o.method, "gmres|cg");
    app->add_option("--tol", o.tol, "relative residual tolerance");
    app->add_option("--max-iter", o.max_iter, "Krylov iteration cap");
    app->add_option("--restart", o.restart, "GMRES restart length");
    app->add_option("--repeats", o.repeats, "solves per sweep point (averaged)");
    app->add_option("--bc", o.bc, "dirichlet|neumann");
    app->add_option("--cell-size", o.h, "element size h (default 1/cells)");
    app->add_option("--out", o.out, "output path prefix");
    app->add_option("--format", o.format, "csv|json|both");
    app->add_flag("--plotdata", o.plotdata, "write per-backend plot series");
    app->add_option("--seed", o.seed, "rng seed recorded with the study");
    app->add_option("--threads", o.threads, "subdomain-level worker threads");
}

gdsw::RunConfig resolve_config(const CliOverrides& o) {
    gdsw::RunConfig cfg;
    if (!o.config.empty())
        cfg = gdsw::run_config_from(gdsw::ConfigFile::parse_file(o.config));
    if (!o.problem.empty()) cfg.problem = o.problem;
    if (!o.cells.empty()) cfg.cells = gdsw::parse_axes(o.cells);
    if (!o.parts.empty()) cfg.parts_sweep = gdsw::parse_axes_list(o.parts);
    if (o.overlap >= 0) cfg.overlap_layers = o.overlap;
    if (!o.backend.empty()) {
        cfg.backends.clear();
        std::istringstream ss(o.backend);
        std::string item;
        while (std::getline(ss, item, ','))
            cfg.backends.push_back(gdsw::backend_from_string(gdsw::detail::trim(item)));
    }
    if (!o.nullspace.empty())
        cfg.nullspace_mode = gdsw::nullspace_mode_from_string(o.nullspace);
    if (!o.coarse.empty()) {
        if (o.coarse != "on" && o.coarse != "off")
            throw std::invalid_argument("--coarse expects on|off");
        cfg.coarse_on = o.coarse == "on";
    }
    if (!o.method.empty()) cfg.method = gdsw::krylov_method_from_string(o.method);
    if (!o.bc.empty()) cfg.bc = o.bc;
    if (o.tol > 0.0) cfg.rel_tol = o.tol;
    if (o.h > 0.0) cfg.h = o.h;
    if (o.max_iter > 0) cfg.max_iter = o.max_iter;
    if (o.restart > 0) cfg.restart = o.restart;
    if (o.repeats > 0) cfg.repeats = o.repeats;
    if (!o.out.empty()) cfg.out = o.out;
    if (!o.format.empty()) cfg.format = o.format;
    if (o.plotdata) cfg.plotdata = true;
    if (o.seed >= 0) cfg.seed = o.seed;
    if (o.threads > 0) cfg.threads = o.threads;
    return cfg;
}

int cmd_run(const CliOverrides& o) {
    gdsw::RunConfig cfg = resolve_config(o);
    cfg.validate();
    auto records = gdsw::run_study(cfg);
    auto written = gdsw::emit_report(records, cfg.out, cfg.format, cfg.plotdata);

    gdsw::write_records_csv(records, std::cout);
    for (const auto& path : written) std::cerr << "wrote " << path << "\n";

    if (!o.dump_components.empty() || !o.dump_decomposition.empty() ||
        !o.dump_phi.empty() || !o.residuals.empty()) {
        // rebuild the first sweep point for the requested dumps
        auto sys = gdsw::build_problem(cfg);
        auto bcfg = gdsw::make_backend_config(cfg.backends.front());
        auto d_full = gdsw::partition_structured(sys.grid, cfg.parts_sweep.front(),
                                                 sys.dofs_per_node);
        auto d = gdsw::restrict_decomposition(d_full, sys.free_dofs);
        d = gdsw::extend_overlap(sys.K, d, cfg.overlap_layers);
        std::vector<gdsw::InterfaceComponent> comps;
        gdsw::CoarseBasis basis;
        if (cfg.coarse_on)
            basis = gdsw::build_coarse_basis(sys.K, d,
                                             gdsw::nullspace_basis(sys, cfg.nullspace_mode),
                                             bcfg, sys.grid.dim, &comps);
        if (!o.dump_decomposition.empty()) {
            gdsw::write_json_file(gdsw::decomposition_to_json(d), o.dump_decomposition);
            std::cerr << "wrote " << o.dump_decomposition << "\n";
        }
        if (!o.dump_components.empty()) {
            gdsw::write_json_file(gdsw::component_report_json(comps), o.dump_components);
            std::cerr << "wrote " << o.dump_components << "\n";
        }
        if (!o.dump_phi.empty()) {
            gdsw::write_matrix_market_file(o.dump_phi, basis.phi,
                                           "coarse basis functions");
            std::cerr << "wrote " << o.dump_phi << "\n";
        }
        if (!o.residuals.empty()) {
            auto m = gdsw::setup_gdsw(sys.K, d, basis, bcfg,
                                      {true, cfg.coarse_on}, cfg.threads);
            gdsw::KrylovConfig kc;
            kc.rel_tol = cfg.rel_tol;
            kc.max_iter = cfg.max_iter;
            kc.restart = cfg.restart;
            auto op_m = [&m](const std::vector<double>& x) { return m.apply(x); };
            auto res = cfg.method == gdsw::KrylovMethod::cg
                           ? gdsw::cg(gdsw::make_operator(sys.K), op_m, sys.f, kc)
                           : gdsw::gmres(gdsw::make_operator(sys.K), op_m, sys.f, kc);
            gdsw::write_residual_history_csv(res, o.residuals);
            std::cerr << "wrote " << o.residuals << "\n";
        }
    }

    for (const auto& r : records)
        if (!r.converged || !r.error.empty()) return 2;
    return 0;
}

int cmd_verify_bound(const CliOverrides& o) {
    gdsw::RunConfig cfg = resolve_config(o);
    cfg.method = gdsw::KrylovMethod::cg;
    auto report = gdsw::verify_bound(cfg);
    auto j = gdsw::bound_report_to_json(report);
    gdsw::write_json_file(j, cfg.out + "_bound.json");
    std::cerr << "wrote " << cfg.out << "_bound.json\n";

    std::printf("%-8s %-10s %-8s %-8s %-12s %-10s %-10s\n", "parts", "subdoms",
                "overlap", "H/h", "kappa_est", "bound", "ratio");
    auto print_point = [](const gdsw::BoundPoint& p) {
        std::printf("%ldx%ldx%ld %-10ld %-8ld %-8ld %-12.4f %-10.4f %-10.4f\n",
                    static_cast<long>(p.parts[0]), static_cast<long>(p.parts[1]),
                    static_cast<long>(p.parts[2]),
                    static_cast<long>(p.n_subdomains), static_cast<long>(p.overlap),
                    static_cast<long>(p.h_over_h), p.kappa_est, p.bound, p.ratio);
    };
    for (const auto& p : report.fixed_resolution_sweep) print_point(p);
    for (const auto& p : report.overlap_sweep) print_point(p);
    std::printf("ratio growth over fixed-H/h sweep: %.3f (%s)\n",
                report.ratio_growth, report.violation ? "VIOLATION" : "ok");
    return report.violation ? 2 : 0;
}

int cmd_export(const CliOverrides& o) {
    gdsw::RunConfig cfg = resolve_config(o);
    auto sys = gdsw::build_problem(cfg);
    gdsw::export_system(sys, cfg.out);
    std::cerr << "wrote " << cfg.out << ".mtx and " << cfg.out << ".json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GDSW two-level overlapping Schwarz scaling-study harness"};
    app.require_subcommand(1);

    CliOverrides run_o, bound_o, export_o;
    CLI::App* run = app.add_subcommand("run", "run a scaling study sweep");
    add_common_flags(run, run_o);
    run->add_option("--dump-components", run_o.dump_components,
                    "write the interface component report (JSON)");
    run->add_option("--dump-decomposition", run_o.dump_decomposition,
                    "write the decomposition (JSON)");
    run->add_option("--dump-phi", run_o.dump_phi,
                    "write the coarse basis (Matrix Market)");
    run->add_option("--residuals", run_o.residuals,
                    "write the residual history of one solve (CSV)");

    CLI::App* bound = app.add_subcommand(
        "verify-bound", "empirical two-level condition bound check");
    add_common_flags(bound, bound_o);

    CLI::App* exp = app.add_subcommand(
        "export", "write a model problem as Matrix Market + JSON sidecar");
    add_common_flags(exp, export_o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(run_o);
        if (bound->parsed()) return cmd_verify_bound(bound_o);
        if (exp->parsed()) return cmd_export(export_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
