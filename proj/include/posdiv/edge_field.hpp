//==============================================================================
// Degree-k polynomials for the magnetic normal component on mesh edges.
// Stored once per geometric edge, so single-valuedness of the normal
// component (and with it the globally divergence-free property) is
// structural, not numerical.
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "posdiv/quadrature.hpp"

namespace posdiv {

inline constexpr int kMaxEdgeCoef = 4; // k <= 3

// Legendre coefficients on the edge reference coordinate sigma in [-1/2,1/2].
struct EdgePoly {
    int N = 3; // k+1 coefficients
    std::array<double, kMaxEdgeCoef> c{};

    double eval(double sigma) const {
        double v = 0.0;
        for (int m = 0; m < N; ++m) v += c[m] * legendre_P(m, 2.0 * sigma);
        return v;
    }
    double mean() const { return c[0]; }
};

// Antiderivative of P_m(2 s) from s = -1/2: needed when the edge normal data
// is integrated into potential boundary values.
inline double legendre_antiderivative(int m, double sigma) {
    const double tau = 2.0 * sigma;
    if (m == 0) return 0.5 * (tau + 1.0);
    return 0.5 * (legendre_P(m + 1, tau) - legendre_P(m - 1, tau)) / (2 * m + 1);
}

// Integral of the edge polynomial from the edge start to parameter sigma,
// in physical units (len = edge length).
inline double edge_integral_to(const EdgePoly& e, double len, double sigma) {
    double v = 0.0;
    for (int m = 0; m < e.N; ++m) v += e.c[m] * legendre_antiderivative(m, sigma);
    return len * v;
}

// L2 projection of a scalar function of the arclength parameter onto the
// edge polynomial space; nq high enough that smooth data projects to
// roundoff and the projected mean matches the exact mean.
inline EdgePoly project_edge(const std::function<double(double)>& f, int k, int nq = 8) {
    EdgePoly e;
    e.N = k + 1;
    const Quadrature1D half = gauss_nodes(nq);
    for (int h = 0; h < 2; ++h) {
        const double c = h ? 0.25 : -0.25;
        for (int q = 0; q < nq; ++q) {
            const double s = c + 0.5 * half.nodes[q];
            const double w = 0.5 * half.weights[q];
            const double fv = f(s);
            for (int m = 0; m < e.N; ++m)
                e.c[m] += w * fv * legendre_P(m, 2.0 * s) * (2 * m + 1);
        }
    }
    return e;
}

// Loop-closure integral of the four edges of a rectangular cell:
//   int (b^y_top - b^y_bottom) dx + int (b^x_right - b^x_left) dy.
// Automatically ~0 for evolved edges; the reconstruction refuses to run
// when it is not.
inline double compatibility_residual(const EdgePoly& left, const EdgePoly& right,
                                     const EdgePoly& bottom, const EdgePoly& top,
                                     double dx, double dy) {
    return dx * (top.mean() - bottom.mean()) + dy * (right.mean() - left.mean());
}

} // namespace posdiv
