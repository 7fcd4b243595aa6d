#include <cmath>
#include <random>

#include "doctest.h"
#include "posdiv/divfree.hpp"
#include "posdiv/edge_field.hpp"
#include "posdiv/mesh.hpp"
#include "posdiv/properties.hpp"

using namespace posdiv;

namespace {
struct Setup {
    int k = 2;
    double dx = 0.7, dy = 1.3;
    PointLayout layout;
    DfReconstructor recon;
    Setup() {
        const CadLayout cad = cad_layout(k, CadVariant::CuiDingWu, 1.0, 1.0);
        layout = PointLayout(k, cad);
        std::vector<double> txi, teta;
        for (int id = 0; id < 4 * (k + 1) * (k + 1); ++id) {
            txi.push_back(layout.xi[id]);
            teta.push_back(layout.eta[id]);
        }
        recon = DfReconstructor(k, dx, dy, txi, teta);
    }
    std::vector<double> targets(double v) const {
        return std::vector<double>(4 * (k + 1) * (k + 1), v);
    }
};
} // namespace

TEST_CASE("compatibility residual") {
    EdgePoly l, r, b, t;
    l.N = r.N = b.N = t.N = 3;
    l.c[0] = r.c[0] = 1.0; // B = (1, 0)
    CHECK(compatibility_residual(l, r, b, t, 0.7, 1.3) == doctest::Approx(0.0));
    EdgePoly r2 = r;
    r2.c[0] += 1.0;
    CHECK(compatibility_residual(l, r2, b, t, 0.7, 1.3) == doctest::Approx(1.3).epsilon(1e-15));
}

TEST_CASE("reconstruction reproduces constant and linear divergence-free fields") {
    Setup s;
    EdgePoly l, r, b, t;
    l.N = r.N = b.N = t.N = 3;
    l.c[0] = r.c[0] = 1.0;
    const DivFreeField f = s.recon.reconstruct(l, r, b, t, s.targets(1.0), s.targets(0.0));
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int q = 0; q < 30; ++q) {
        const double xi = u(rng), eta = u(rng);
        CHECK(f.eval_B1(xi, eta) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(f.eval_B2(xi, eta)) < 1e-13);
    }

    // B = (y, x): divergence-free linear field
    auto B1 = [](double, double y) { return y; };
    auto B2 = [](double x, double) { return x; };
    const EdgePoly L = project_edge([&](double sg) { return B1(-0.5 * s.dx, sg * s.dy); }, s.k);
    const EdgePoly R = project_edge([&](double sg) { return B1(0.5 * s.dx, sg * s.dy); }, s.k);
    const EdgePoly B = project_edge([&](double sg) { return B2(sg * s.dx, -0.5 * s.dy); }, s.k);
    const EdgePoly T = project_edge([&](double sg) { return B2(sg * s.dx, 0.5 * s.dy); }, s.k);
    std::vector<double> t1, t2;
    for (int id = 0; id < 4 * (s.k + 1) * (s.k + 1); ++id) {
        t1.push_back(B1(s.layout.xi[id] * s.dx, s.layout.eta[id] * s.dy));
        t2.push_back(B2(s.layout.xi[id] * s.dx, s.layout.eta[id] * s.dy));
    }
    const DivFreeField g = s.recon.reconstruct(L, R, B, T, t1, t2);
    for (int q = 0; q < 30; ++q) {
        const double xi = u(rng), eta = u(rng);
        CHECK(g.eval_B1(xi, eta) == doctest::Approx(eta * s.dy).epsilon(1e-12));
        CHECK(g.eval_B2(xi, eta) == doctest::Approx(xi * s.dx).epsilon(1e-12));
    }
}

TEST_CASE("reconstruction exactness suite (random divergence-free quadratics)") {
    const SuiteResult r = divfree_suite();
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("closure violation is refused") {
    Setup s;
    EdgePoly l, r, b, t;
    l.N = r.N = b.N = t.N = 3;
    r.c[0] = 1.0; // net outflux, loop does not close
    CHECK_THROWS_AS(s.recon.reconstruct(l, r, b, t, s.targets(0.5), s.targets(0.0)),
                    StructuralError);
}

TEST_CASE("divergence audit catches a corrupted coefficient") {
    Setup s;
    // random divergence-free field through the reconstruction
    EdgePoly l, r, b, t;
    l.N = r.N = b.N = t.N = 3;
    l.c[0] = r.c[0] = 0.3;
    l.c[1] = r.c[1] = 0.1;
    b.c[0] = t.c[0] = -0.2;
    DivFreeField f = s.recon.reconstruct(l, r, b, t, s.targets(0.3), s.targets(-0.2));
    std::vector<double> sx(s.layout.xi.begin(), s.layout.xi.end());
    std::vector<double> sy(s.layout.eta.begin(), s.layout.eta.end());
    CHECK(max_pointwise_divergence(f, s.dx, s.dy, sx, sy) < 1e-13);
    f.B1[1 * f.n + 0] += 0.01; // corrupt an interior mode
    CHECK(max_pointwise_divergence(f, s.dx, s.dy, sx, sy) > 1e-4);
}

TEST_CASE("edge trace matching is exact") {
    Setup s;
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> cf(-1.0, 1.0);
    EdgePoly l, r, b, t;
    l.N = r.N = b.N = t.N = 3;
    for (int m = 0; m < 3; ++m) {
        l.c[m] = cf(rng);
        r.c[m] = cf(rng);
        b.c[m] = cf(rng);
        t.c[m] = cf(rng);
    }
    // close the loop by adjusting one mean
    const double res = compatibility_residual(l, r, b, t, s.dx, s.dy);
    t.c[0] -= res / s.dx;
    const DivFreeField f = s.recon.reconstruct(l, r, b, t, s.targets(0.0), s.targets(0.0));
    for (int h = 0; h < 2; ++h)
        for (int nu = 0; nu < 3; ++nu) {
            const double sg = s.layout.hnode(h, nu);
            CHECK(f.eval_B1(-0.5, sg) == doctest::Approx(l.eval(sg)).epsilon(1e-12));
            CHECK(f.eval_B1(0.5, sg) == doctest::Approx(r.eval(sg)).epsilon(1e-12));
            CHECK(f.eval_B2(sg, -0.5) == doctest::Approx(b.eval(sg)).epsilon(1e-12));
            CHECK(f.eval_B2(sg, 0.5) == doctest::Approx(t.eval(sg)).epsilon(1e-12));
        }
}
