#include <cmath>
#include <random>

#include "doctest.h"
#include "posdiv/basis.hpp"

using namespace posdiv;

namespace {
std::array<double, kNumR> constant(double v) {
    std::array<double, kNumR> a{};
    a.fill(v);
    return a;
}
} // namespace

TEST_CASE("projection of constants and linears") {
    const CellRect cell{0.4, 0.6, 0.2, 0.3};
    const CellPolynomial p = l2_project([](double, double) { return constant(5.0); }, cell, 2);
    CHECK(p.coef(0, 0) == doctest::Approx(5.0).epsilon(1e-14));
    for (int l = 1; l < p.Nb; ++l) CHECK(std::abs(p.coef(0, l)) < 1e-14);

    auto lin = [](double x, double y) {
        std::array<double, kNumR> a{};
        for (int c = 0; c < kNumR; ++c) a[c] = 2.0 * x - 0.5 * y + 0.1 * c;
        return a;
    };
    const CellPolynomial q = l2_project(lin, cell, 2);
    const auto at_center = poly_eval(q, cell, cell.xc, cell.yc);
    CHECK(at_center[0] == doctest::Approx(2.0 * cell.xc - 0.5 * cell.yc).epsilon(1e-13));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int t = 0; t < 20; ++t) {
        const double x = cell.xc + u(rng) * cell.dx, y = cell.yc + u(rng) * cell.dy;
        const auto v = poly_eval(q, cell, x, y);
        CHECK(v[3] == doctest::Approx(2.0 * x - 0.5 * y + 0.3).epsilon(1e-13));
    }
}

TEST_CASE("projection error decreases at the expected rate") {
    auto f = [](double x, double) { return constant(std::sin(2.0 * M_PI * x))[0]; };
    const int k = 2;
    double prev = 0.0;
    std::vector<double> errs;
    for (int lvl = 0; lvl < 3; ++lvl) {
        const double h = 0.2 / (1 << lvl);
        const CellRect cell{0.3, 0.0, h, h};
        const CellPolynomial p =
            l2_project([&](double x, double y) { return constant(f(x, y)); }, cell, k);
        // L2 error on the cell by quadrature
        const Quadrature1D q = gauss_nodes(8);
        double e2 = 0.0;
        for (int ix = 0; ix < 8; ++ix)
            for (int iy = 0; iy < 8; ++iy) {
                const double x = cell.xc + q.nodes[ix] * h, y = cell.yc + q.nodes[iy] * h;
                const double d = poly_eval(p, cell, x, y)[0] - f(x, y);
                e2 += q.weights[ix] * q.weights[iy] * d * d;
            }
        errs.push_back(std::sqrt(e2));
        (void)prev;
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 > 2.7);
    CHECK(order2 > 2.8); // expected k+1 = 3
}

TEST_CASE("poly_eval basics and the orthogonality of the basis") {
    const CellRect cell{0.0, 0.0, 1.0, 1.0};
    CellPolynomial c(2);
    c.coef(0, 0) = 3.0;
    CHECK(poly_eval(c, cell, 0.25, -0.3)[0] == doctest::Approx(3.0));
    CHECK_THROWS_AS(poly_eval(c, cell, 0.51, 0.0), DomainError);

    const ModalBasis basis(2);
    const Quadrature1D q = gauss_nodes(4);
    for (int l = 0; l < basis.Nb; ++l)
        for (int m = 0; m < basis.Nb; ++m) {
            double s = 0.0;
            for (int ix = 0; ix < 4; ++ix)
                for (int iy = 0; iy < 4; ++iy)
                    s += q.weights[ix] * q.weights[iy] * basis.eval(l, q.nodes[ix], q.nodes[iy]) *
                         basis.eval(m, q.nodes[ix], q.nodes[iy]);
            if (l == m) CHECK(s == doctest::Approx(1.0 / basis.inv_mass[l]).epsilon(1e-13));
            else CHECK(std::abs(s) < 1e-13);
        }

    // cross-check against the standard library Legendre implementation
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5), cf(-1.0, 1.0);
    CellPolynomial p(2);
    for (int comp = 0; comp < kNumR; ++comp)
        for (int l = 0; l < p.Nb; ++l) p.coef(comp, l) = cf(rng);
    for (int t = 0; t < 50; ++t) {
        const double xi = u(rng), eta = u(rng);
        const auto v = poly_eval(p, cell, xi, eta);
        for (int comp = 0; comp < kNumR; ++comp) {
            double ref = 0.0;
            for (int l = 0; l < p.Nb; ++l)
                ref += p.coef(comp, l) * std::legendre(basis.ax[l], 2.0 * xi) *
                       std::legendre(basis.ay[l], 2.0 * eta);
            CHECK(v[comp] == doctest::Approx(ref).epsilon(1e-13));
        }
    }
}

TEST_CASE("cell average is the zeroth coefficient") {
    CellPolynomial c(2);
    c.coef(0, 0) = 5.0;
    CHECK(cell_average_of(c)[0] == doctest::Approx(5.0));
    CellPolynomial z(2);
    CHECK(cell_average_of(z)[0] == 0.0);

    std::mt19937 rng(9);
    std::uniform_real_distribution<double> cf(-1.0, 1.0);
    const CellRect cell{0.7, -0.2, 0.4, 0.9};
    CellPolynomial p(2);
    for (int comp = 0; comp < kNumR; ++comp)
        for (int l = 0; l < p.Nb; ++l) p.coef(comp, l) = cf(rng);
    const Quadrature1D q = gauss_nodes(5);
    for (int comp = 0; comp < kNumR; ++comp) {
        double avg = 0.0;
        for (int ix = 0; ix < 5; ++ix)
            for (int iy = 0; iy < 5; ++iy)
                avg += q.weights[ix] * q.weights[iy] *
                       poly_eval(p, cell, cell.xc + q.nodes[ix] * cell.dx,
                                 cell.yc + q.nodes[iy] * cell.dy)[comp];
        CHECK(avg == doctest::Approx(cell_average_of(p)[comp]).epsilon(1e-14));
    }
}

TEST_CASE("projection idempotence") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> cf(-1.0, 1.0);
    const CellRect cell{0.1, 0.2, 0.5, 0.25};
    CellPolynomial p(2);
    for (int comp = 0; comp < kNumR; ++comp)
        for (int l = 0; l < p.Nb; ++l) p.coef(comp, l) = cf(rng);
    const CellPolynomial q = l2_project(
        [&](double x, double y) { return poly_eval(p, cell, x, y); }, cell, 2);
    for (int comp = 0; comp < kNumR; ++comp)
        for (int l = 0; l < p.Nb; ++l)
            CHECK(q.coef(comp, l) == doctest::Approx(p.coef(comp, l)).epsilon(1e-13));
}
