#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdsw/config.hpp"
#include "gdsw/export.hpp"
#include "gdsw/krylov.hpp"
#include "gdsw/precond.hpp"
#include "gdsw/problems.hpp"

namespace gdsw {

/// One sweep configuration for the study runner. Flags on the CLI override
/// the corresponding config-file keys.
struct RunConfig {
    // problem block
    std::string problem = "laplace2d"; // laplace1d|laplace2d|laplace3d|elasticity3d
    std::array<index_t, 3> cells = {16, 16, 1};
    double h = 0.0; // <= 0 means 1 / cells[0]
    double youngs_modulus = 210.0;
    double poisson_ratio = 0.3;
    std::string bc = "dirichlet"; // dirichlet | neumann

    // decomposition block
    std::vector<std::array<index_t, 3>> parts_sweep = {{2, 2, 1}};
    index_t overlap_layers = 2;

    // coarse block
    bool coarse_on = true;
    NullspaceMode nullspace_mode = NullspaceMode::one_dimensional;

    // solver block
    KrylovMethod method = KrylovMethod::gmres;
    double rel_tol = 1e-8;
    index_t max_iter = 1000;
    index_t restart = 200;
    index_t repeats = 1;

    std::vector<Backend> backends = {Backend::sparse_lu_ordered,
                                     Backend::sparse_lu_natural,
                                     Backend::dense_lu};

    // output block
    std::string out = "study";
    std::string format = "csv"; // csv | json | both
    bool plotdata = false;
    long long seed = 0;
    index_t threads = 1;

    void validate() const {
        if (parts_sweep.empty())
            throw std::invalid_argument("RunConfig: need at least one sweep point");
        if (!(rel_tol > 0.0))
            throw std::invalid_argument("RunConfig: tol must be positive");
        if (backends.empty())
            throw std::invalid_argument("RunConfig: need at least one backend");
        if (repeats < 1)
            throw std::invalid_argument("RunConfig: repeats must be >= 1");
        if (problem != "laplace1d" && problem != "laplace2d" &&
            problem != "laplace3d" && problem != "elasticity3d")
            throw std::invalid_argument("RunConfig: unknown problem " + problem);
        if (bc != "dirichlet" && bc != "neumann")
            throw std::invalid_argument("RunConfig: unknown bc " + bc);
        if (format != "csv" && format != "json" && format != "both")
            throw std::invalid_argument("RunConfig: unknown format " + format);
    }

    int dim() const {
        if (problem == "laplace1d") return 1;
        if (problem == "laplace2d") return 2;
        return 3;
    }
};

/// Parses "8", "4x4", or "2x3x4" into per-axis counts.
inline std::array<index_t, 3> parse_axes(const std::string& text) {
    std::array<index_t, 3> out = {1, 1, 1};
    std::string item;
    std::istringstream ss(text);
    int axis = 0;
    while (std::getline(ss, item, 'x')) {
        if (axis >= 3) throw std::invalid_argument("too many axes in " + text);
        try {
            out[axis] = std::stoll(detail::trim(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad axis count in " + text);
        }
        ++axis;
    }
    if (axis == 0) throw std::invalid_argument("empty axis list");
    return out;
}

inline std::vector<std::array<index_t, 3>> parse_axes_list(const std::string& text) {
    std::vector<std::array<index_t, 3>> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) out.push_back(parse_axes(item));
    }
    return out;
}

inline RunConfig run_config_from(const ConfigFile& f) {
    RunConfig c;
    c.problem = f.get_string("problem", "kind", c.problem);
    c.cells = parse_axes(f.get_string("problem", "cells", "16x16"));
    c.h = f.get_double("problem", "h", c.h);
    c.youngs_modulus = f.get_double("problem", "E", c.youngs_modulus);
    c.poisson_ratio = f.get_double("problem", "nu", c.poisson_ratio);
    c.bc = f.get_string("problem", "bc", c.bc);

    if (f.has("decomposition", "parts")) {
        c.parts_sweep.clear();
        for (const auto& p : f.get_string_array("decomposition", "parts", {}))
            c.parts_sweep.push_back(parse_axes(p));
    }
    c.overlap_layers = f.get_int("decomposition", "overlap", c.overlap_layers);

    c.coarse_on = f.get_bool("coarse", "enabled", c.coarse_on);
    c.nullspace_mode = nullspace_mode_from_string(
        f.get_string("coarse", "nullspace", to_string(c.nullspace_mode)));

    c.method = krylov_method_from_string(
        f.get_string("solver", "method", to_string(c.method)));
    c.rel_tol = f.get_double("solver", "tol", c.rel_tol);
    c.max_iter = f.get_int("solver", "max_iter", c.max_iter);
    c.restart = f.get_int("solver", "restart", c.restart);
    c.repeats = f.get_int("solver", "repeats", c.repeats);

    if (f.has("backends", "list")) {
        c.backends.clear();
        for (const auto& b : f.get_string_array("backends", "list", {}))
            c.backends.push_back(backend_from_string(b));
    }

    c.out = f.get_string("output", "out", c.out);
    c.format = f.get_string("output", "format", c.format);
    c.plotdata = f.get_bool("output", "plotdata", c.plotdata);
    c.seed = f.get_int("run", "seed", c.seed);
    c.threads = f.get_int("run", "threads", c.threads);
    return c;
}

inline AssembledSystem build_problem(const RunConfig& cfg) {
    std::array<index_t, 3> cells = cfg.cells;
    const double h = cfg.h > 0.0 ? cfg.h : 1.0 / static_cast<double>(cells[0]);
    if (cfg.problem == "elasticity3d") {
        StructuredGrid grid(3, cells, h);
        FaceSet faces = cfg.bc == "neumann" ? FaceSet::none() : FaceSet::xmin();
        return assemble_elasticity3d(grid, cfg.youngs_modulus, cfg.poisson_ratio,
                                     faces);
    }
    StructuredGrid grid(cfg.dim(), cells, h);
    BoundaryCondition bc = cfg.bc == "neumann" ? BoundaryCondition::neumann_all
                                               : BoundaryCondition::dirichlet_all;
    return assemble_laplace(grid, bc);
}

/// One row of a scaling study, mirroring the solver-time table layout.
struct RunRecord {
    index_t n_subdomains = 0;
    double krylov_iterations = 0.0; // average over repeated solves
    index_t max_size_ki = 0;
    index_t size_k0 = 0;
    double solver_time = 0.0; // preconditioner build + Krylov iterations
    double subd_solve_time = 0.0;
    double coarse_solve_time = 0.0;
    double setup_time = 0.0;
    std::string backend;
    std::optional<double> cond_estimate;
    bool converged = false;
    std::string error; // empty on clean rows

    bool operator==(const RunRecord&) const = default;
};

inline const std::vector<std::string>& run_record_columns() {
    static const std::vector<std::string> cols = {
        "n_subdomains",   "krylov_iterations", "max_size_Ki",
        "size_K0",        "solver_time",       "subd_solve_time",
        "coarse_solve_time", "setup_time",     "backend",
        "cond_estimate",  "converged",         "error"};
    return cols;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

/// Runs one (sweep point x backend) study cell.
inline RunRecord run_single(const RunConfig& cfg, const AssembledSystem& sys,
                            const std::array<index_t, 3>& parts, Backend backend,
                            std::vector<InterfaceComponent>* components_out = nullptr) {
    RunRecord rec;
    rec.backend = to_string(backend);
    index_t n_parts = 1;
    for (int a = 0; a < sys.grid.dim; ++a) n_parts *= parts[a];
    rec.n_subdomains = n_parts;
    try {
        BackendConfig bcfg = make_backend_config(backend);
        WallTimer setup_timer;
        auto d_full = partition_structured(sys.grid, parts, sys.dofs_per_node);
        auto d = restrict_decomposition(d_full, sys.free_dofs);
        d = extend_overlap(sys.K, d, cfg.overlap_layers);
        CoarseBasis basis;
        if (cfg.coarse_on) {
            auto ns = nullspace_basis(sys, cfg.nullspace_mode);
            basis = build_coarse_basis(sys.K, d, ns, bcfg, sys.grid.dim,
                                       components_out);
        }
        auto m = setup_gdsw(sys.K, d, basis, bcfg, {true, cfg.coarse_on},
                            cfg.threads);
        rec.setup_time = setup_timer.seconds();
        rec.max_size_ki = m.max_local_dim();
        rec.size_k0 = m.coarse_dim();

        LinearOperator op_a = make_operator(sys.K);
        LinearOperator op_m = [&m](const std::vector<double>& x) {
            return m.apply(x);
        };
        KrylovConfig kc;
        kc.method = cfg.method;
        kc.rel_tol = cfg.rel_tol;
        kc.max_iter = cfg.max_iter;
        kc.restart = cfg.restart;

        WallTimer iterate_timer;
        double iter_sum = 0.0;
        bool all_converged = true;
        KrylovResult last;
        for (index_t rep = 0; rep < cfg.repeats; ++rep) {
            last = cfg.method == KrylovMethod::cg ? cg(op_a, op_m, sys.f, kc)
                                                  : gmres(op_a, op_m, sys.f, kc);
            iter_sum += static_cast<double>(last.iterations);
            all_converged = all_converged && last.converged;
        }
        const double iterate_time = iterate_timer.seconds();
        rec.krylov_iterations = iter_sum / static_cast<double>(cfg.repeats);
        rec.solver_time = rec.setup_time + iterate_time;
        auto t = m.timers();
        rec.subd_solve_time = t.subdomain_solve;
        rec.coarse_solve_time = t.coarse_solve;
        rec.cond_estimate = last.cond_estimate;
        rec.converged = all_converged;
    } catch (const std::exception& e) {
        rec.converged = false;
        rec.error = e.what();
    }
    return rec;
}

} // namespace detail

/// Runs the full sweep: for every sweep point the problem is assembled
/// once, then every backend is timed on it. Failed cells are recorded with
/// an error tag instead of aborting the sweep.
inline std::vector<RunRecord> run_study(const RunConfig& cfg) {
    cfg.validate();
    std::vector<RunRecord> records;
    for (const auto& parts : cfg.parts_sweep) {
        AssembledSystem sys = build_problem(cfg);
        for (Backend backend : cfg.backends)
            records.push_back(detail::run_single(cfg, sys, parts, backend));
    }
    return records;
}

inline nlohmann::json records_to_json(const std::vector<RunRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j;
        j["n_subdomains"] = r.n_subdomains;
        j["krylov_iterations"] = r.krylov_iterations;
        j["max_size_Ki"] = r.max_size_ki;
        j["size_K0"] = r.size_k0;
        j["solver_time"] = r.solver_time;
        j["subd_solve_time"] = r.subd_solve_time;
        j["coarse_solve_time"] = r.coarse_solve_time;
        j["setup_time"] = r.setup_time;
        j["backend"] = r.backend;
        if (r.cond_estimate)
            j["cond_estimate"] = *r.cond_estimate;
        else
            j["cond_estimate"] = nullptr;
        j["converged"] = r.converged;
        j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::vector<RunRecord> records_from_json(const nlohmann::json& arr) {
    std::vector<RunRecord> records;
    for (const auto& j : arr) {
        RunRecord r;
        r.n_subdomains = j.at("n_subdomains").get<index_t>();
        r.krylov_iterations = j.at("krylov_iterations").get<double>();
        r.max_size_ki = j.at("max_size_Ki").get<index_t>();
        r.size_k0 = j.at("size_K0").get<index_t>();
        r.solver_time = j.at("solver_time").get<double>();
        r.subd_solve_time = j.at("subd_solve_time").get<double>();
        r.coarse_solve_time = j.at("coarse_solve_time").get<double>();
        r.setup_time = j.at("setup_time").get<double>();
        r.backend = j.at("backend").get<std::string>();
        if (!j.at("cond_estimate").is_null())
            r.cond_estimate = j.at("cond_estimate").get<double>();
        r.converged = j.at("converged").get<bool>();
        r.error = j.at("error").get<std::string>();
        records.push_back(std::move(r));
    }
    return records;
}

inline void write_records_csv(const std::vector<RunRecord>& records,
                              std::ostream& out) {
    const auto& cols = run_record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    for (const auto& r : records) {
        out << r.n_subdomains << ',' << detail::format_double(r.krylov_iterations)
            << ',' << r.max_size_ki << ',' << r.size_k0 << ','
            << detail::format_double(r.solver_time) << ','
            << detail::format_double(r.subd_solve_time) << ','
            << detail::format_double(r.coarse_solve_time) << ','
            << detail::format_double(r.setup_time) << ',' << r.backend << ','
            << (r.cond_estimate ? detail::format_double(*r.cond_estimate) : "")
            << ',' << (r.converged ? 1 : 0) << ','
            << detail::sanitize_csv(r.error) << "\n";
    }
}

/// Writes the report files and returns the paths written. format is one of
/// csv, json, both; plotdata adds per-backend two-column series.
inline std::vector<std::string> emit_report(const std::vector<RunRecord>& records,
                                            const std::string& out_prefix,
                                            const std::string& format,
                                            bool plotdata) {
    if (records.empty())
        throw std::invalid_argument("emit_report: no records");
    std::vector<std::string> written;
    auto open = [](const std::string& path) {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
        return f;
    };
    if (format == "csv" || format == "both") {
        auto f = open(out_prefix + ".csv");
        write_records_csv(records, f);
        written.push_back(out_prefix + ".csv");
    }
    if (format == "json" || format == "both") {
        auto f = open(out_prefix + ".json");
        f << records_to_json(records).dump(2) << "\n";
        written.push_back(out_prefix + ".json");
    }
    if (plotdata) {
        std::vector<std::string> backends;
        for (const auto& r : records)
            if (std::find(backends.begin(), backends.end(), r.backend) ==
                backends.end())
                backends.push_back(r.backend);
        for (const auto& b : backends) {
            auto ft = open(out_prefix + "_solver_time_" + b + ".dat");
            auto fi = open(out_prefix + "_iterations_" + b + ".dat");
            for (const auto& r : records) {
                if (r.backend != b) continue;
                ft << r.n_subdomains << " " << detail::format_double(r.solver_time)
                   << "\n";
                fi << r.n_subdomains << " "
                   << detail::format_double(r.krylov_iterations) << "\n";
            }
            written.push_back(out_prefix + "_solver_time_" + b + ".dat");
            written.push_back(out_prefix + "_iterations_" + b + ".dat");
        }
    }
    return written;
}

inline void write_residual_history_csv(const KrylovResult& res,
                                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "iteration,residual,ratio\n";
    const double r0 = res.residual_history.empty() ? 1.0 : res.residual_history[0];
    for (std::size_t k = 0; k < res.residual_history.size(); ++k)
        out << k << ',' << detail::format_double(res.residual_history[k]) << ','
            << detail::format_double(r0 == 0.0 ? 0.0
                                               : res.residual_history[k] / r0)
            << "\n";
}

/// One measured point of the condition-bound check.
struct BoundPoint {
    std::array<index_t, 3> parts = {1, 1, 1};
    index_t n_subdomains = 1;
    index_t overlap = 2;
    index_t h_over_h = 1; // H/h: cells per part along axis 0
    double h_over_delta = 1.0;
    double kappa_est = 0.0;
    index_t iterations = 0;
    double bound = 0.0; // (1 + H/delta)(1 + log(H/h))
    double ratio = 0.0; // kappa / bound
};

struct BoundReport {
    std::vector<BoundPoint> fixed_resolution_sweep; // fixed H/h, growing parts
    std::vector<BoundPoint> overlap_sweep;          // fixed parts, overlap 1..3
    double ratio_growth = 1.0; // max ratio / first ratio over the fixed-H/h sweep
    bool violation = false;    // ratio grew by more than a factor of 2
};

namespace detail {

inline BoundPoint bound_point(const RunConfig& cfg,
                              const std::array<index_t, 3>& parts,
                              index_t overlap) {
    RunConfig point = cfg;
    point.method = KrylovMethod::cg;
    point.overlap_layers = overlap;
    point.parts_sweep = {parts};
    const index_t cells_per_part = cfg.cells[0] / cfg.parts_sweep[0][0];
    for (int a = 0; a < point.dim(); ++a) point.cells[a] = parts[a] * cells_per_part;
    point.h = 1.0 / static_cast<double>(point.cells[0]);

    AssembledSystem sys = build_problem(point);
    RunRecord rec = detail::run_single(point, sys, parts, cfg.backends.front());
    if (!rec.error.empty())
        throw std::runtime_error("verify_bound: sweep point failed: " + rec.error);

    BoundPoint p;
    p.parts = parts;
    p.n_subdomains = rec.n_subdomains;
    p.overlap = overlap;
    p.h_over_h = cells_per_part;
    p.h_over_delta = static_cast<double>(cells_per_part) /
                     static_cast<double>(overlap);
    p.kappa_est = rec.cond_estimate.value_or(0.0);
    p.iterations = static_cast<index_t>(rec.krylov_iterations);
    p.bound = (1.0 + p.h_over_delta) *
              (1.0 + std::log(static_cast<double>(p.h_over_h)));
    p.ratio = p.kappa_est / p.bound;
    return p;
}

} // namespace detail

/// Empirical check of the two-level condition bound: sweep (a) keeps H/h
/// fixed while the subdomain count grows, sweep (b) keeps the partition
/// fixed and varies the overlap over 1..3 layers. The violation flag is
/// raised when kappa/bound grows by more than a factor of 2 over sweep (a).
inline BoundReport verify_bound(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.problem.rfind("laplace", 0) != 0 || cfg.bc != "dirichlet")
        throw std::invalid_argument(
            "verify_bound: requires an SPD Laplace problem with Dirichlet bc");
    if (!cfg.coarse_on)
        throw std::invalid_argument("verify_bound: requires the coarse level");
    for (int a = 1; a < cfg.dim(); ++a)
        if (cfg.cells[a] / cfg.parts_sweep[0][a] !=
            cfg.cells[0] / cfg.parts_sweep[0][0])
            throw std::invalid_argument(
                "verify_bound: H/h must be uniform across axes");

    BoundReport report;
    for (const auto& parts : cfg.parts_sweep)
        report.fixed_resolution_sweep.push_back(
            detail::bound_point(cfg, parts, cfg.overlap_layers));
    for (index_t overlap = 1; overlap <= 3; ++overlap)
        report.overlap_sweep.push_back(
            detail::bound_point(cfg, cfg.parts_sweep.front(), overlap));

    double first = report.fixed_resolution_sweep.front().ratio;
    double max_ratio = first;
    for (const auto& p : report.fixed_resolution_sweep)
        max_ratio = std::max(max_ratio, p.ratio);
    report.ratio_growth = max_ratio / first;
    report.violation = report.ratio_growth > 2.0;
    return report;
}

inline nlohmann::json bound_report_to_json(const BoundReport& report) {
    auto point_json = [](const BoundPoint& p) {
        return nlohmann::json{{"parts", {p.parts[0], p.parts[1], p.parts[2]}},
                              {"n_subdomains", p.n_subdomains},
                              {"overlap", p.overlap},
                              {"H_over_h", p.h_over_h},
                              {"H_over_delta", p.h_over_delta},
                              {"kappa_est", p.kappa_est},
                              {"iterations", p.iterations},
                              {"bound", p.bound},
                              {"ratio", p.ratio}};
    };
    nlohmann::json j;
    j["fixed_resolution_sweep"] = nlohmann::json::array();
    for (const auto& p : report.fixed_resolution_sweep)
        j["fixed_resolution_sweep"].push_back(point_json(p));
    j["overlap_sweep"] = nlohmann::json::array();
    for (const auto& p : report.overlap_sweep)
        j["overlap_sweep"].push_back(point_json(p));
    j["ratio_growth"] = report.ratio_growth;
    j["violation"] = report.violation;
    return j;
}

} // namespace gdsw
