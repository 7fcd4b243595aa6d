//==============================================================================
// Cell average decomposition (CAD): expresses the average of a degree-k
// polynomial over a rectangle as a convex combination of edge-node values
// (N-point Gauss per edge) and a small set of internal nodes.  The boundary
// weights control the positivity-preserving CFL bound of the scheme.
//
// Two variants are provided: the classical Gauss-Lobatto tensor construction
// and the improved decomposition with fewer nodes and larger boundary
// weights.  Both are exact for polynomials of total degree <= k.
//==============================================================================
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "posdiv/errors.hpp"
#include "posdiv/quadrature.hpp"

namespace posdiv {

enum class CadVariant { ZhangShu, CuiDingWu };

inline const char* to_string(CadVariant v) {
    return v == CadVariant::ZhangShu ? "zhang_shu" : "cui_ding_wu";
}

struct CadNode {
    double x, y; // on the reference square [-1/2,1/2]^2
    double w;
};

struct CadLayout {
    CadVariant variant = CadVariant::CuiDingWu;
    int k = 2;
    int N = 3;                       // Gauss points per edge (= k+1)
    double zeta = 0.0;               // (a1/dx - a2/dy) / (a1/dx + a2/dy)
    double omega_star = 0.25;        // boundary-weight budget in the CFL bound
    double omega_x = 0.0;            // per-node factor on left/right edges
    double omega_y = 0.0;            // per-node factor on bottom/top edges
    std::vector<CadNode> internal;   // S internal nodes with weights
    Quadrature1D edge_gauss;         // N-point rule shared by all four edges

    double internal_weight_sum() const {
        double s = 0.0;
        for (const auto& n : internal) s += n.w;
        return s;
    }
    double total_weight() const { return 2.0 * omega_x + 2.0 * omega_y + internal_weight_sum(); }
};

// omega_star for the improved variant as a function of zeta and k.
inline double cdw_omega_star(int k, double zeta) {
    const double az = std::abs(zeta);
    if (k == 1) return 0.5;
    if (k == 2 || k == 3) return 1.0 / (4.0 + 2.0 * az);
    if (k == 4 || k == 5) {
        const double z2 = zeta * zeta;
        const double s = 78.0 * z2 + 46.0;
        const double c = std::cos(std::acos((1476.0 * z2 - 244.0) / std::pow(s, 1.5)) / 3.0);
        return 1.0 / (14.0 / 3.0 + 2.0 / 3.0 * std::sqrt(s) * c);
    }
    throw ConfigError("cad_layout: unsupported degree k=" + std::to_string(k) +
                      " for the improved decomposition");
}

// Build the decomposition for wave-speed ratios r1 = a1/dx, r2 = a2/dy.
inline CadLayout cad_layout(int k, CadVariant variant, double r1, double r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0))
        throw ConfigError("cad_layout: wave-speed ratios must be positive");
    if (k < 1) throw ConfigError("cad_layout: k must be >= 1");

    CadLayout cad;
    cad.variant = variant;
    cad.k = k;
    cad.N = k + 1;
    cad.edge_gauss = gauss_nodes(cad.N);
    cad.zeta = (r1 - r2) / (r1 + r2);
    const double lam1 = r1 / (r1 + r2);
    const double lam2 = r2 / (r1 + r2);

    if (variant == CadVariant::ZhangShu) {
        if (k > 3) throw ConfigError("cad_layout: Gauss-Lobatto variant built for k <= 3");
        const int L = (k + 4) / 2; // ceil((k+3)/2)
        const Quadrature1D gl = gauss_lobatto_nodes(L);
        cad.omega_star = 1.0 / (L * (L - 1));
        cad.omega_x = cad.omega_star * lam1;
        cad.omega_y = cad.omega_star * lam2;
        for (int l = 1; l < L - 1; ++l) {
            for (int mu = 0; mu < cad.N; ++mu) {
                cad.internal.push_back({gl.nodes[l], cad.edge_gauss.nodes[mu],
                                        lam1 * gl.weights[l] * cad.edge_gauss.weights[mu]});
                cad.internal.push_back({cad.edge_gauss.nodes[mu], gl.nodes[l],
                                        lam2 * gl.weights[l] * cad.edge_gauss.weights[mu]});
            }
        }
        return cad;
    }

    // Improved variant.
    cad.omega_star = cdw_omega_star(k, cad.zeta);
    if (k > 3)
        throw ConfigError("cad_layout: internal nodes of the improved variant "
                          "are built for k <= 3 (configure k in {1,2,3})");
    cad.omega_x = cad.omega_star * lam1;
    cad.omega_y = cad.omega_star * lam2;
    if (k == 1) return cad; // boundary weights alone are exact for P^1

    // Internal nodes on the quadrant midline aligned with the larger ratio:
    // two symmetric nodes whose offset restores the second moment that the
    // asymmetric boundary weights leave behind.
    const double W = 1.0 - 2.0 * cad.omega_x - 2.0 * cad.omega_y;
    const double az = std::abs(cad.zeta);
    const double b = std::sqrt(az / (6.0 * (1.0 + az)));
    if (cad.zeta >= 0.0) {
        cad.internal.push_back({0.0, +b, 0.5 * W});
        cad.internal.push_back({0.0, -b, 0.5 * W});
    } else {
        cad.internal.push_back({+b, 0.0, 0.5 * W});
        cad.internal.push_back({-b, 0.0, 0.5 * W});
    }
    return cad;
}

// Apply the decomposition to point samples of a scalar field on the
// reference square: edge values at (±1/2, g_mu) and (g_mu, ±1/2) plus the
// internal nodes.  Used by tests to verify exactness.
template <typename F>
double cad_apply(const CadLayout& cad, F&& f) {
    double sum = 0.0;
    for (int mu = 0; mu < cad.N; ++mu) {
        const double g = cad.edge_gauss.nodes[mu];
        const double w = cad.edge_gauss.weights[mu];
        sum += cad.omega_x * w * (f(-0.5, g) + f(0.5, g));
        sum += cad.omega_y * w * (f(g, -0.5) + f(g, 0.5));
    }
    for (const auto& n : cad.internal) sum += n.w * f(n.x, n.y);
    return sum;
}

} // namespace posdiv
