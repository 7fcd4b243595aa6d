#include <cmath>
#include <random>

#include "doctest.h"
#include "posdiv/physics.hpp"
#include "posdiv/properties.hpp"

using namespace posdiv;

namespace {
const double g53 = 5.0 / 3.0;

Vec8 cons(double rho, double m1, double m2, double m3, double B1, double B2, double B3, double E) {
    return {rho, m1, m2, m3, B1, B2, B3, E};
}
} // namespace

TEST_CASE("prim_to_cons hand values") {
    PrimitiveState v;
    v.rho = 1.0;
    v.p = 1.0;
    CHECK(prim_to_cons(v, g53)[UE] == doctest::Approx(1.5).epsilon(1e-14));

    // Orszag-Tang corner state: static, E = p/(gamma-1)
    v.rho = 25.0 / 9.0;
    v.p = 5.0 / 3.0;
    CHECK(prim_to_cons(v, g53)[UE] == doctest::Approx(2.5).epsilon(1e-14));

    v.rho = 1.0;
    v.u = {1, 0, 0};
    v.B = {0, 1, 0};
    v.p = 0.1;
    CHECK(prim_to_cons(v, g53)[UE] == doctest::Approx(1.15).epsilon(1e-14));

    v.rho = -1.0;
    CHECK_THROWS_AS(prim_to_cons(v, g53), DomainError);
}

TEST_CASE("cons_to_prim hand values and round trip") {
    const PrimitiveState v = cons_to_prim(cons(1, 0, 0, 0, 0, 0, 0, 1.5), g53);
    CHECK(v.p == doctest::Approx(1.0).epsilon(1e-14));

    const PrimitiveState w = cons_to_prim(cons(1, 0, 0, 0, 0, 1, 0, 1), g53);
    CHECK(w.p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(cons_to_prim(cons(-1, 0, 0, 0, 0, 0, 0, 1), g53), InadmissibleError);

    std::mt19937 rng(7);
    for (int t = 0; t < 500; ++t) {
        const Vec8 u = random_admissible(rng);
        const Vec8 u2 = prim_to_cons(cons_to_prim(u, g53), g53);
        for (int c = 0; c < 8; ++c)
            CHECK(u2[c] == doctest::Approx(u[c]).epsilon(1e-14));
    }
}

TEST_CASE("flux static states and symbolic cross-check") {
    const Vec8 st = cons(1, 0, 0, 0, 0, 0, 0, 1.5); // p = 1
    const Vec8 f1 = flux(st, 1, g53);
    const Vec8 f2 = flux(st, 2, g53);
    for (int c = 0; c < 8; ++c) {
        CHECK(f1[c] == doctest::Approx(c == UM1 ? 1.0 : 0.0).epsilon(1e-14));
        CHECK(f2[c] == doctest::Approx(c == UM2 ? 1.0 : 0.0).epsilon(1e-14));
    }

    // independent componentwise evaluation from primitive variables
    auto oracle = [](const Vec8& u, int l) {
        const double rho = u[URHO];
        const double ul[3] = {u[UM1] / rho, u[UM2] / rho, u[UM3] / rho};
        const double B[3] = {u[UB1], u[UB2], u[UB3]};
        const double p = (g53 - 1.0) * internal_energy(u);
        const double ptot = p + 0.5 * (B[0] * B[0] + B[1] * B[1] + B[2] * B[2]);
        const double uB = ul[0] * B[0] + ul[1] * B[1] + ul[2] * B[2];
        Vec8 f{};
        f[URHO] = rho * ul[l - 1];
        for (int i = 0; i < 3; ++i)
            f[UM1 + i] = rho * ul[l - 1] * ul[i] - B[l - 1] * B[i] + (i == l - 1 ? ptot : 0.0);
        for (int i = 0; i < 3; ++i) f[UB1 + i] = ul[l - 1] * B[i] - B[l - 1] * ul[i];
        f[UE] = ul[l - 1] * (u[UE] + ptot) - B[l - 1] * uB;
        return f;
    };
    std::mt19937 rng(11);
    for (int t = 0; t < 1000; ++t) {
        const Vec8 u = random_admissible(rng);
        for (int l = 1; l <= 2; ++l) {
            const Vec8 fa = flux(u, l, g53);
            const Vec8 fb = oracle(u, l);
            double scale = 1.0;
            for (int c = 0; c < 8; ++c) scale = std::max(scale, std::abs(fb[c]));
            for (int c = 0; c < 8; ++c) CHECK(std::abs(fa[c] - fb[c]) <= 1e-13 * scale);
        }
    }
}

TEST_CASE("electric_field_z") {
    CHECK(electric_field_z(cons(1, 1, 0, 0, 0, 1, 0, 3)) == doctest::Approx(-1.0));
    CHECK(electric_field_z(cons(1, 0, 0, 0, 2, 3, 0, 9)) == doctest::Approx(0.0));
    CHECK(electric_field_z(cons(1, 0, 2, 0, 3, 0, 0, 9)) == doctest::Approx(6.0));
    CHECK_THROWS_AS(electric_field_z(cons(-1, 0, 0, 0, 0, 0, 0, 1)), DomainError);
}

TEST_CASE("internal_energy") {
    CHECK(internal_energy(cons(1, 0, 0, 0, 0, 1, 0, 1)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(internal_energy(cons(2, 2, 0, 0, 0, 0, 0, 1)) == doctest::Approx(0.0));
    CHECK(internal_energy(cons(1, 0, 0, 0, 0, 0, 0, 2.5)) == doctest::Approx(2.5));
    CHECK_THROWS_AS(internal_energy(cons(0, 0, 0, 0, 0, 0, 0, 1)), DomainError);
}

TEST_CASE("is_admissible") {
    PrimitiveState ot;
    ot.rho = 25.0 / 9.0;
    ot.p = 5.0 / 3.0;
    CHECK(is_admissible(prim_to_cons(ot, g53)));
    CHECK_FALSE(is_admissible(cons(1, 1, 0, 0, 0, 0, 0, 0.4))); // rho e = -0.1
    CHECK_FALSE(is_admissible(cons(-1e-16, 0, 0, 0, 0, 0, 0, 1)));
}

TEST_CASE("gql_dot") {
    const Vec8 u = cons(2, 1, -1, 0, 0.5, 0, 0, 4);
    const auto z = gql_dot(u, GqlDirection{});
    CHECK(z[0] == doctest::Approx(2.0));
    CHECK(z[1] == doctest::Approx(4.0));

    GqlDirection d;
    d.u_star = {1, 0, 0};
    const auto g = gql_dot(cons(1, 0, 0, 0, 0, 0, 0, 1), d);
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(1.5));

    // for admissible U the quadratic identity gives
    // U.n* + |B*|^2/2 = rho e + rho|u*-u|^2/2 + |B*-B|^2/2 >= rho e > 0
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> any(-3.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        const Vec8 u2 = random_admissible(rng);
        const double ei = internal_energy(u2);
        double lo = 1e300;
        for (int s = 0; s < 100; ++s) {
            GqlDirection dd{{any(rng), any(rng), any(rng)}, {any(rng), any(rng), any(rng)}};
            lo = std::min(lo, gql_dot(u2, dd)[1]);
        }
        GqlDirection dmin{{u2[UM1] / u2[URHO], u2[UM2] / u2[URHO], u2[UM3] / u2[URHO]},
                          {u2[UB1], u2[UB2], u2[UB3]}};
        lo = std::min(lo, gql_dot(u2, dmin)[1]);
        CHECK(lo == doctest::Approx(ei).epsilon(1e-12));
        CHECK(lo > 0.0);
    }
}

TEST_CASE("entropy value") {
    CHECK(entropy_value(cons(1, 0, 0, 0, 0, 0, 0, 1.5), g53) == doctest::Approx(0.0));
    const double e = std::exp(1.0);
    CHECK(entropy_value(cons(1, 0, 0, 0, 0, 0, 0, e / (g53 - 1.0)), g53) == doctest::Approx(-1.0));
    const double p = std::pow(2.0, g53);
    CHECK(entropy_value(cons(2, 0, 0, 0, 0, 0, 0, p / (g53 - 1.0)), g53) ==
          doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("entropy hessian: finite differences, symmetry, positive definiteness") {
    // finite-difference oracle on the analytic gradient
    auto fd_hessian = [](const Vec8& u, double step) {
        Mat8 H{};
        for (int j = 0; j < 8; ++j) {
            Vec8 up = u, um = u;
            up[j] += step;
            um[j] -= step;
            const Vec8 gp = entropy_gradient(up, g53);
            const Vec8 gm = entropy_gradient(um, g53);
            for (int i = 0; i < 8; ++i) H[i][j] = (gp[i] - gm[i]) / (2.0 * step);
        }
        return H;
    };
    const Vec8 u0 = cons(1, 0, 0, 0, 0, 0, 0, 1.5);
    const Mat8 Ha = entropy_hessian(u0, g53);
    const Mat8 Hf = fd_hessian(u0, 1e-5);
    double hnorm = 0.0, diff = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            hnorm = std::max(hnorm, std::abs(Ha[i][j]));
            diff = std::max(diff, std::abs(Ha[i][j] - Hf[i][j]));
        }
    CHECK(diff <= 1e-6 * hnorm);

    // gradient itself cross-checked against finite differences of g
    auto fd_grad = [](const Vec8& u, double step) {
        Vec8 g{};
        for (int j = 0; j < 8; ++j) {
            Vec8 up = u, um = u;
            up[j] += step;
            um[j] -= step;
            g[j] = (entropy_value(up, g53) - entropy_value(um, g53)) / (2.0 * step);
        }
        return g;
    };
    const Vec8 ga = entropy_gradient(u0, g53);
    const Vec8 gf = fd_grad(u0, 1e-6);
    for (int j = 0; j < 8; ++j) CHECK(ga[j] == doctest::Approx(gf[j]).epsilon(1e-7));

    std::mt19937 rng(17);
    for (int t = 0; t < 100; ++t) {
        const Vec8 u = random_admissible(rng);
        const Mat8 H = entropy_hessian(u, g53);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) CHECK(H[i][j] == H[j][i]);
        // Cholesky must succeed on the admissible set
        Mat8 L{};
        bool spd = true;
        for (int i = 0; i < 8 && spd; ++i)
            for (int j = 0; j <= i && spd; ++j) {
                double s = H[i][j];
                for (int p = 0; p < j; ++p) s -= L[i][p] * L[j][p];
                if (i == j) {
                    if (!(s > 0.0)) spd = false;
                    else L[i][i] = std::sqrt(s);
                } else {
                    L[i][j] = s / L[j][j];
                }
            }
        CHECK(spd);
    }
}

TEST_CASE("max_wave_speed_pair") {
    const Vec8 st = cons(1, 0, 0, 0, 0, 0, 0, 1.5);
    CHECK(max_wave_speed_pair(st, st, 1, g53) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

    // B = 0 collapses the directional bound to |u_l| + C_s
    PrimitiveState v;
    v.rho = 1.2;
    v.u = {0.4, -0.2, 0.1};
    v.p = 0.7;
    const Vec8 u = prim_to_cons(v, g53);
    const double e = v.p / ((g53 - 1.0) * v.rho);
    const double Cs = v.p / (v.rho * std::sqrt(2.0 * e));
    CHECK(max_wave_speed_pair(u, u, 1, g53) == doctest::Approx(std::abs(v.u[0]) + Cs).epsilon(1e-14));

    std::mt19937 rng(19);
    for (int t = 0; t < 100; ++t) {
        const Vec8 a = random_admissible(rng);
        const Vec8 b = random_admissible(rng);
        for (int l = 1; l <= 2; ++l)
            CHECK(max_wave_speed_pair(a, b, l, g53) == max_wave_speed_pair(b, a, l, g53));
    }
    CHECK_THROWS_AS(max_wave_speed_pair(cons(-1, 0, 0, 0, 0, 0, 0, 1), st, 1, g53),
                    InadmissibleError);
}

TEST_CASE("gql equivalence suite") {
    const SuiteResult r = gql_suite();
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("flux inequality suite") {
    const SuiteResult r = glf_suite();
    INFO(r.detail);
    CHECK(r.pass);
}
