#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "posdiv/cli.hpp"
#include "posdiv/config.hpp"
#include "posdiv/io.hpp"

using namespace posdiv;

TEST_CASE("error norms") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    const ErrorNorms zero = error_norms(a, a);
    CHECK(zero.l1 == 0.0);
    CHECK(zero.l2 == 0.0);
    CHECK(zero.linf == 0.0);

    std::vector<double> b = {1.5, 2.5, 3.5, 4.5}; // constant error 0.5
    const ErrorNorms c = error_norms(a, b);
    CHECK(c.l1 == doctest::Approx(0.5));
    CHECK(c.l2 == doctest::Approx(0.5));
    CHECK(c.linf == doctest::Approx(0.5));

    std::vector<double> wrong = {1.0};
    CHECK_THROWS_AS(error_norms(a, wrong), ConfigError);
}

TEST_CASE("convergence orders") {
    CHECK(convergence_order(6.331e-4, 7.501e-5) == doctest::Approx(3.077).epsilon(1e-3));
    CHECK(convergence_order(8e-3, 1e-3) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(convergence_order(4.854e-2, 5.790e-3) == doctest::Approx(3.068).epsilon(1e-3));
    CHECK_THROWS_AS(convergence_order(0.0, 1e-3), ConfigError);
}

TEST_CASE("config round trip and rejection of unknown keys") {
    RunConfig def;
    const std::string canon = def.canonical();
    const RunConfig again = parse_config_text(canon);
    CHECK(again.canonical() == canon);

    RunConfig cfg = parse_config_text("problem.name = alfven\n# comment\ngrid.nx = 12\n"
                                      "cfl.nu = 0.15\ncad.variant = zhang_shu\n");
    CHECK(cfg.problem_name == "alfven");
    CHECK(cfg.grid_nx == 12);
    CHECK(cfg.solver.cfl_nu == doctest::Approx(0.15));
    CHECK(cfg.solver.cad_variant == CadVariant::ZhangShu);

    CHECK_THROWS_AS(parse_config_text("nonsense.key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("grid.nx = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("cfl.pp_bound = maybe\n"), ConfigError);
}

TEST_CASE("csv dump: uniform 2x2 grid and bit-exact round trip") {
    ProblemSpec prob;
    prob.name = "uniform";
    prob.xmax = prob.ymax = 1.0;
    prob.initial = [](double, double) {
        PrimitiveState v;
        v.rho = 1.7;
        v.u = {0.3, 0.1, -0.2};
        v.B = {0.25, -0.55, 0.4};
        v.p = 0.9;
        return v;
    };
    const MeshPair mesh = build_mesh_pair(0, 1, 0, 1, 2, 2);
    SolverConfig scfg;
    CdgSolver solver(prob, mesh, scfg);
    solver.initialize();
    const FieldDump dump = make_dump(solver);
    CHECK(dump.rows.size() == 4);
    for (const auto& r : dump.rows) {
        CHECK(r[2] == doctest::Approx(1.7).epsilon(1e-13));
        CHECK(r[9] == doctest::Approx(0.9).epsilon(1e-12));
    }

    const std::string path = "test_dump_roundtrip.csv";
    write_csv(dump, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == FieldDump::kHeader);
    for (const auto& r : dump.rows) {
        std::string line;
        REQUIRE(std::getline(in, line));
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        for (double expect : r) {
            double got;
            ss >> got;
            CHECK(got == expect); // 17 significant digits round-trip exactly
        }
    }
    std::remove(path.c_str());

    const std::string vpath = "test_dump.vtk";
    write_vtk(dump, vpath);
    std::ifstream vin(vpath);
    std::string first;
    std::getline(vin, first);
    CHECK(first == "# vtk DataFile Version 3.0");
    std::remove(vpath.c_str());
}

TEST_CASE("cli basics") {
    CHECK(cli({"dump-config"}) == 0);
    CHECK(cli({"run", "--config", "missing.cfg"}) == 2);
    CHECK(cli({"check", "--suite", "nonexistent"}) == 2);
    CHECK(cli({"bogus"}) == 2);
    CHECK(cli({}) == 2);
}

TEST_CASE("cli check gql suite passes") {
    CHECK(cli({"check", "--suite", "gql"}) == 0);
}
