//==============================================================================
// Command line driver: run, convergence, check, dump-config.
//==============================================================================
#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "posdiv/config.hpp"
#include "posdiv/io.hpp"
#include "posdiv/problems.hpp"
#include "posdiv/properties.hpp"
#include "posdiv/solver.hpp"

namespace posdiv {

struct RunSetup {
    ProblemSpec prob;
    MeshPair mesh;
};

inline RunSetup make_setup(const RunConfig& cfg) {
    RunSetup s;
    s.prob = init_problem(cfg.problem_name, cfg.problem_B0, cfg.problem_mach);
    const int nx = cfg.grid_nx > 0 ? cfg.grid_nx : s.prob.default_nx;
    const int ny = cfg.grid_ny > 0 ? cfg.grid_ny : s.prob.default_ny;
    s.mesh = build_mesh_pair(s.prob.xmin, s.prob.xmax, s.prob.ymin, s.prob.ymax, nx, ny);
    return s;
}

// Advance to t_end, logging diagnostics and writing periodic dumps.
inline StepDiagnostics run_to_end(CdgSolver& solver, double t_end, const RunConfig& cfg,
                                  bool write_outputs, std::ostream* progress = nullptr) {
    namespace fs = std::filesystem;
    std::string diag_path;
    if (write_outputs) {
        fs::create_directories(cfg.output_directory);
        diag_path = cfg.output_directory + "/diagnostics.log";
        std::ofstream(diag_path, std::ios::trunc);
    }
    int dump_index = 0;
    auto dump_now = [&]() {
        if (!write_outputs) return;
        const FieldDump d = make_dump(solver);
        char name[64];
        std::snprintf(name, sizeof name, "dump_%04d", dump_index++);
        if (cfg.output_formats.find("csv") != std::string::npos)
            write_csv(d, cfg.output_directory + "/" + name + ".csv");
        if (cfg.output_formats.find("vtk") != std::string::npos)
            write_vtk(d, cfg.output_directory + "/" + name + ".vtk");
    };

    double next_dump = cfg.output_interval > 0.0 ? cfg.output_interval : 2.0 * t_end + 1.0;
    StepDiagnostics diag;
    while (solver.state().t < t_end * (1.0 - 1e-14)) {
        const double budget = std::min(t_end, next_dump) - solver.state().t;
        const TimeStepInfo info = solver.compute_dt(budget);
        diag = solver.ssp_rk3_step(info);
        if (!diag_path.empty()) append_diagnostics(diag_path, diag);
        if (progress && diag.step % 50 == 0)
            *progress << "step " << diag.step << " t=" << diag.t << " dt=" << diag.dt << "\n";
        if (cfg.output_interval > 0.0 && solver.state().t >= next_dump * (1.0 - 1e-14)) {
            dump_now();
            next_dump += cfg.output_interval;
        }
    }
    dump_now();
    return diag;
}

//------------------------------------------------------------------------------
struct ConvergenceRow {
    int n = 0;
    ErrorNorms e;
    double order_l1 = 0.0, order_l2 = 0.0, order_linf = 0.0;
};

inline std::vector<ConvergenceRow> convergence_study(const std::string& problem, int levels,
                                                     int base_n, int component,
                                                     const SolverConfig& scfg,
                                                     std::ostream* progress = nullptr) {
    std::vector<ConvergenceRow> rows;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const int n = base_n << lvl;
        RunConfig rc;
        rc.problem_name = problem;
        rc.grid_nx = rc.grid_ny = n;
        rc.solver = scfg;
        const RunSetup setup = make_setup(rc);
        CdgSolver solver(setup.prob, setup.mesh, scfg);
        solver.initialize();
        run_to_end(solver, setup.prob.t_end, rc, false, progress);
        const FieldFn exact = setup.prob.exact(setup.prob.t_end);
        const auto num = sample_component(solver, component);
        const auto ref = sample_exact_component(setup.mesh, exact, setup.prob.gamma, component);
        ConvergenceRow row;
        row.n = n;
        row.e = error_norms(num, ref);
        if (!rows.empty()) {
            row.order_l1 = convergence_order(rows.back().e.l1, row.e.l1);
            row.order_l2 = convergence_order(rows.back().e.l2, row.e.l2);
            row.order_linf = convergence_order(rows.back().e.linf, row.e.linf);
        }
        rows.push_back(row);
        if (progress)
            *progress << "level " << n << "x" << n << " l1=" << row.e.l1 << " order=" << row.order_l1
                      << "\n";
    }
    return rows;
}

//------------------------------------------------------------------------------
inline int cli(const std::vector<std::string>& args) {
    try {
        if (args.empty()) {
            std::cerr << "usage: posdiv {run|convergence|check|dump-config} [options]\n";
            return 2;
        }
        const std::string cmd = args[0];
        auto opt = [&](const std::string& name, const std::string& fallback) {
            for (size_t i = 1; i + 1 < args.size(); ++i)
                if (args[i] == name) return args[i + 1];
            return fallback;
        };

        if (cmd == "dump-config") {
            RunConfig cfg;
            std::cout << cfg.canonical();
            return 0;
        }
        if (cmd == "check") {
            const std::string suite = opt("--suite", "all");
            std::vector<std::pair<std::string, SuiteResult>> results;
            if (suite == "gql" || suite == "all") results.emplace_back("gql", gql_suite());
            if (suite == "lemma-glf" || suite == "all") results.emplace_back("lemma-glf", glf_suite());
            if (suite == "cad" || suite == "all") results.emplace_back("cad", cad_suite());
            if (suite == "divfree" || suite == "all") results.emplace_back("divfree", divfree_suite());
            if (suite == "limiter" || suite == "all") results.emplace_back("limiter", limiter_suite());
            if (results.empty()) throw ConfigError("check: unknown suite '" + suite + "'");
            bool ok = true;
            for (const auto& [name, res] : results) {
                std::cout << (res.pass ? "PASS " : "FAIL ") << name << ": " << res.detail << "\n";
                ok = ok && res.pass;
            }
            return ok ? 0 : 1;
        }
        if (cmd == "run") {
            RunConfig cfg;
            const std::string path = opt("--config", "");
            if (!path.empty()) cfg = load_config_file(path);
            for (size_t i = 1; i < args.size(); ++i) {
                if (args[i] == "--config") { ++i; continue; }
                const size_t eq = args[i].find('=');
                if (eq != std::string::npos)
                    cfg.set(args[i].substr(0, eq), args[i].substr(eq + 1));
            }
            const RunSetup setup = make_setup(cfg);
            CdgSolver solver(setup.prob, setup.mesh, cfg.solver);
            solver.initialize();
            const double t_end = cfg.t_end >= 0.0 ? cfg.t_end : setup.prob.t_end;
            const StepDiagnostics d = run_to_end(solver, t_end, cfg, true, &std::cout);
            std::cout << "done: t=" << solver.state().t << " steps=" << d.step
                      << " min_rho=" << d.min_rho << " max_divb=" << d.max_divb << "\n";
            return 0;
        }
        if (cmd == "convergence") {
            const std::string problem = opt("--problem", "alfven");
            const int levels = std::stoi(opt("--levels", "3"));
            const int base = std::stoi(opt("--base", "20"));
            SolverConfig scfg;
            scfg.k = std::stoi(opt("--kmax", "2"));
            const int comp = problem == "vortex" ? UM1 : UB1;
            const auto rows = convergence_study(problem, levels, base, comp, scfg, &std::cout);
            std::printf("%10s %12s %7s %12s %7s %12s %7s\n", "grid", "l1", "order", "l2", "order",
                        "linf", "order");
            for (const auto& r : rows)
                std::printf("%5dx%-5d %12.3e %7.3f %12.3e %7.3f %12.3e %7.3f\n", r.n, r.n, r.e.l1,
                            r.order_l1, r.e.l2, r.order_l2, r.e.linf, r.order_linf);
            return 0;
        }
        std::cerr << "unknown subcommand '" << cmd << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const StructuralError& e) {
        std::cerr << "structural audit failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace posdiv
