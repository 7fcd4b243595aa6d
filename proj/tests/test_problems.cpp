#include <cmath>

#include "doctest.h"
#include "posdiv/problems.hpp"

using namespace posdiv;

TEST_CASE("orszag-tang catalog entry") {
    const ProblemSpec p = init_problem("orszag_tang");
    const double g = p.gamma;
    CHECK(g == doctest::Approx(5.0 / 3.0));
    CHECK(p.xmax == doctest::Approx(2.0 * M_PI));
    CHECK(p.default_nx == 200);
    const PrimitiveState v = p.initial(0.3, 1.1);
    CHECK(v.rho == doctest::Approx(g * g));
    CHECK(v.p == doctest::Approx(g));
    CHECK(v.u[0] == doctest::Approx(-std::sin(1.1)));
    CHECK(v.u[1] == doctest::Approx(std::sin(0.3)));
    CHECK(v.B[0] == doctest::Approx(-std::sin(1.1)));
    CHECK(v.B[1] == doctest::Approx(std::sin(0.6)));
    CHECK(p.bc_left.kind == BcKind::Periodic);
}

TEST_CASE("blast catalog entries") {
    const ProblemSpec b1 = init_problem("blast_i");
    CHECK(b1.gamma == doctest::Approx(1.4));
    CHECK(b1.xmin == doctest::Approx(-0.5));
    CHECK(b1.p0 == doctest::Approx(1e3));
    const PrimitiveState in = b1.initial(0.0, 0.05);
    CHECK(in.p == doctest::Approx(1e3));
    CHECK(in.B[0] == doctest::Approx(100.0 / std::sqrt(4.0 * M_PI)));
    const PrimitiveState out = b1.initial(0.3, 0.3);
    CHECK(out.p == doctest::Approx(0.1));
    CHECK(b1.bc_left.kind == BcKind::Outflow);

    const ProblemSpec b2 = init_problem("blast_ii");
    CHECK(b2.p0 == doctest::Approx(1e4));
    CHECK(b2.t_end == doctest::Approx(0.001));
    const ProblemSpec b3 = init_problem("blast_iii");
    CHECK(b3.initial(0, 0).B[1] == doctest::Approx(100.0 / std::sqrt(8.0 * M_PI)));
}

TEST_CASE("jet catalog entry") {
    const ProblemSpec j = init_problem("jet_m800");
    CHECK(j.gamma == doctest::Approx(1.4));
    const PrimitiveState amb = j.initial(0.2, 0.7);
    CHECK(amb.rho == doctest::Approx(0.1 * 1.4));
    CHECK(amb.B[1] == doctest::Approx(std::sqrt(200.0)));
    CHECK(amb.p == doctest::Approx(1.0));
    CHECK(j.bc_bottom.kind == BcKind::InflowSegment);
    CHECK(j.bc_bottom.seg_lo == doctest::Approx(-0.05));
    CHECK(j.bc_bottom.state.rho == doctest::Approx(1.4));
    CHECK(j.bc_bottom.state.u[1] == doctest::Approx(800.0));

    const ProblemSpec fast = init_problem("jet_m800", std::sqrt(20000.0), 1e6);
    CHECK(fast.bc_bottom.state.u[1] == doctest::Approx(1e6));
    CHECK(fast.initial(0, 0).B[1] == doctest::Approx(std::sqrt(20000.0)));
}

TEST_CASE("rotor and shock-cloud entries") {
    const ProblemSpec r = init_problem("rotor");
    CHECK(r.initial(0.5, 0.5).rho == doctest::Approx(10.0));
    CHECK(r.initial(0.9, 0.9).rho == doctest::Approx(1.0));
    CHECK(r.initial(0.2, 0.2).B[0] == doctest::Approx(2.5 / std::sqrt(4.0 * M_PI)));
    CHECK(r.t_end == doctest::Approx(0.295));

    const ProblemSpec sc = init_problem("shock_cloud");
    CHECK(sc.initial(0.2, 0.5).p == doctest::Approx(167.345));
    CHECK(sc.initial(0.8, 0.5).rho == doctest::Approx(10.0)); // inside the cloud
    CHECK(sc.initial(0.95, 0.1).u[0] == doctest::Approx(-11.2536));
    CHECK(sc.bc_right.kind == BcKind::Inflow);
    CHECK(sc.bc_right.state.B[1] == doctest::Approx(0.56418958));
}

TEST_CASE("unknown problem and unsupported exact solutions") {
    CHECK_THROWS_AS(init_problem("nonexistent"), ConfigError);
    CHECK_THROWS_AS(exact_solution("orszag_tang", 0.1), ConfigError);
    CHECK_THROWS_AS(init_problem("orszag_tang", 2.0, 0.0), ConfigError);
}

TEST_CASE("alfven exact solution: periodic return and translation identity") {
    const ProblemSpec p = init_problem("alfven");
    const FieldFn at1 = exact_solution("alfven", 1.0);
    const FieldFn at05 = exact_solution("alfven", 0.5);
    const double ca = std::cos(M_PI / 4.0), sa = std::sin(M_PI / 4.0);
    for (double x : {0.1, 0.7, 1.3})
        for (double y : {0.05, 0.6, 1.2}) {
            const PrimitiveState a = p.initial(x, y);
            const PrimitiveState b = at1(x, y);
            CHECK(b.rho == doctest::Approx(a.rho).epsilon(1e-14));
            for (int c = 0; c < 3; ++c) {
                CHECK(b.u[c] == doctest::Approx(a.u[c]).epsilon(1e-13));
                CHECK(b.B[c] == doctest::Approx(a.B[c]).epsilon(1e-13));
            }
            // half-period translate equals the initial data shifted along the
            // propagation direction
            const PrimitiveState c1 = at05(x, y);
            const PrimitiveState c2 = p.initial(x + 0.5 * ca, y + 0.5 * sa);
            for (int c = 0; c < 3; ++c) CHECK(c1.B[c] == doctest::Approx(c2.B[c]).epsilon(1e-13));
        }
}

TEST_CASE("vortex exact solution at t = 0 is the initial data") {
    const ProblemSpec p = init_problem("vortex");
    const FieldFn at0 = exact_solution("vortex", 0.0);
    for (double x : {-3.0, 0.2, 5.0}) {
        const PrimitiveState a = p.initial(x, 0.4);
        const PrimitiveState b = at0(x, 0.4);
        CHECK(a.p == doctest::Approx(b.p).epsilon(1e-14));
        CHECK(a.u[0] == doctest::Approx(b.u[0]).epsilon(1e-14));
    }
    // the low-pressure core is barely positive
    CHECK(p.initial(0.0, 0.0).p > 0.0);
    CHECK(p.initial(0.0, 0.0).p < 1e-4);
}

TEST_CASE("initial data is admissible pointwise for every catalog entry") {
    for (const char* name : {"alfven", "vortex", "orszag_tang", "rotor", "blast_i", "blast_ii",
                             "blast_iii", "shock_cloud", "jet_m800"}) {
        const ProblemSpec p = init_problem(name);
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 40; ++j) {
                const double x = p.xmin + (i + 0.31) / 40.0 * (p.xmax - p.xmin);
                const double y = p.ymin + (j + 0.67) / 40.0 * (p.ymax - p.ymin);
                const PrimitiveState v = p.initial(x, y);
                CHECK(v.rho > 0.0);
                CHECK(v.p > 0.0);
            }
    }
}
