//==============================================================================
// Orthogonal modal bases on a rectangular cell.
//
// ModalBasis: scaled Legendre products P_a(2 xi) P_b(2 eta) with a+b <= k on
// reference coordinates xi, eta in [-1/2, 1/2]; phi_0 == 1 so the zeroth
// coefficient of any expansion is the cell average.
//
// TensorBasis: the full tensor space with per-direction degree <= deg, used
// for the magnetic potential (degree k+1 per direction).
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "posdiv/errors.hpp"
#include "posdiv/physics.hpp"
#include "posdiv/quadrature.hpp"

namespace posdiv {

inline constexpr int kMaxK = 3;
inline constexpr int kMaxNb = (kMaxK + 1) * (kMaxK + 2) / 2; // 10

struct CellRect {
    double xc = 0.0, yc = 0.0; // center
    double dx = 1.0, dy = 1.0;

    double xi(double x) const { return (x - xc) / dx; }
    double eta(double y) const { return (y - yc) / dy; }
    double area() const { return dx * dy; }
    bool contains(double x, double y, double tol = 1e-12) const {
        return std::abs(xi(x)) <= 0.5 + tol && std::abs(eta(y)) <= 0.5 + tol;
    }
};

struct ModalBasis {
    int k = 2;
    int Nb = 6;
    std::array<int, kMaxNb> ax{}, ay{}, deg{};
    std::array<double, kMaxNb> inv_mass{}; // (2a+1)(2b+1)

    explicit ModalBasis(int k_ = 2) : k(k_) {
        if (k < 0 || k > kMaxK) throw ConfigError("ModalBasis: k out of range [0,3]");
        Nb = (k + 1) * (k + 2) / 2;
        int l = 0;
        for (int d = 0; d <= k; ++d)
            for (int a = d; a >= 0; --a, ++l) {
                ax[l] = a;
                ay[l] = d - a;
                deg[l] = d;
                inv_mass[l] = (2.0 * a + 1.0) * (2.0 * (d - a) + 1.0);
            }
    }

    double eval(int l, double xi, double eta) const {
        return legendre_P(ax[l], 2.0 * xi) * legendre_P(ay[l], 2.0 * eta);
    }
    // Derivatives with respect to the reference coordinates.
    double dxi(int l, double xi, double eta) const {
        return 2.0 * legendre_dP(ax[l], 2.0 * xi) * legendre_P(ay[l], 2.0 * eta);
    }
    double deta(int l, double xi, double eta) const {
        return 2.0 * legendre_P(ax[l], 2.0 * xi) * legendre_dP(ay[l], 2.0 * eta);
    }
};

// Modal coefficients of the 6-component vector R on one cell.
struct CellPolynomial {
    int k = 2;
    int Nb = 6;
    std::array<double, kNumR * kMaxNb> c{}; // component-major: c[comp*Nb + l]

    explicit CellPolynomial(int k_ = 2) : k(k_) { Nb = (k + 1) * (k + 2) / 2; }

    double& coef(int comp, int l) { return c[comp * Nb + l]; }
    double coef(int comp, int l) const { return c[comp * Nb + l]; }
};

// L2 projection of a pointwise field onto P^k, exact for polynomial inputs of
// total degree <= k.  The quadrature order covers integrands well past the
// basis degree so smooth initial data is projected to near machine accuracy.
inline CellPolynomial l2_project(const std::function<std::array<double, kNumR>(double, double)>& f,
                                 const CellRect& cell, int k, int nq = 6) {
    const ModalBasis basis(k);
    const Quadrature1D q = gauss_nodes(nq);
    CellPolynomial p(k);
    for (int ix = 0; ix < nq; ++ix) {
        for (int iy = 0; iy < nq; ++iy) {
            const double xi = q.nodes[ix], eta = q.nodes[iy];
            const double w = q.weights[ix] * q.weights[iy];
            const auto val = f(cell.xc + xi * cell.dx, cell.yc + eta * cell.dy);
            for (int l = 0; l < basis.Nb; ++l) {
                const double phi = basis.eval(l, xi, eta);
                for (int comp = 0; comp < kNumR; ++comp)
                    p.coef(comp, l) += w * phi * val[comp] * basis.inv_mass[l];
            }
        }
    }
    return p;
}

inline std::array<double, kNumR> poly_eval(const CellPolynomial& p, const CellRect& cell,
                                           double x, double y) {
    if (!cell.contains(x, y))
        throw DomainError("poly_eval: point outside cell");
    const ModalBasis basis(p.k);
    const double xi = cell.xi(x), eta = cell.eta(y);
    std::array<double, kNumR> out{};
    for (int l = 0; l < p.Nb; ++l) {
        const double phi = basis.eval(l, xi, eta);
        for (int comp = 0; comp < kNumR; ++comp) out[comp] += p.coef(comp, l) * phi;
    }
    return out;
}

inline std::array<double, kNumR> cell_average_of(const CellPolynomial& p) {
    std::array<double, kNumR> avg{};
    for (int comp = 0; comp < kNumR; ++comp) avg[comp] = p.coef(comp, 0);
    return avg;
}

//------------------------------------------------------------------------------
// Tensor-product Legendre space of per-direction degree <= deg.
struct TensorBasis {
    int deg = 3; // per-direction degree
    int n = 4;   // deg + 1

    explicit TensorBasis(int deg_) : deg(deg_), n(deg_ + 1) {}

    int idx(int a, int b) const { return a * n + b; }
    int size() const { return n * n; }

    double eval(const double* c, double xi, double eta) const {
        double px[8], py[8];
        for (int a = 0; a < n; ++a) px[a] = legendre_P(a, 2.0 * xi);
        for (int b = 0; b < n; ++b) py[b] = legendre_P(b, 2.0 * eta);
        double s = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += c[idx(a, b)] * px[a] * py[b];
        return s;
    }

    // d/dxi in coefficient space (reference derivative, includes the factor 2
    // from the argument scaling): P'_a = sum_{m<a, m+a odd} 2(2m+1) P_m.
    void dxi_coeffs(const double* c, double* out) const {
        for (int i = 0; i < size(); ++i) out[i] = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double v = c[idx(a, b)];
                if (v == 0.0) continue;
                for (int m = a - 1; m >= 0; m -= 2) out[idx(m, b)] += 2.0 * (2 * m + 1) * v;
            }
    }
    void deta_coeffs(const double* c, double* out) const {
        for (int i = 0; i < size(); ++i) out[i] = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double v = c[idx(a, b)];
                if (v == 0.0) continue;
                for (int m = b - 1; m >= 0; m -= 2) out[idx(a, m)] += 2.0 * (2 * m + 1) * v;
            }
    }
};

} // namespace posdiv
