//==============================================================================
// Legendre polynomials and Gauss / Gauss-Lobatto rules on [-1/2, 1/2].
//
// All 1D rules in the solver live on the unit reference interval with weights
// summing to one, so a cell integral is (cell measure) x (weighted sum).
//==============================================================================
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "posdiv/errors.hpp"

namespace posdiv {

// P_n and P_n' at t in [-1,1].
inline void legendre_eval(int n, double t, double& P, double& dP) {
    double p0 = 1.0, p1 = t;
    if (n == 0) { P = 1.0; dP = 0.0; return; }
    for (int m = 2; m <= n; ++m) {
        const double p2 = ((2 * m - 1) * t * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    P = p1;
    dP = (t * t == 1.0) ? 0.5 * n * (n + 1) * std::pow(t, n + 1)
                        : n * (t * p1 - p0) / (t * t - 1.0);
}

inline double legendre_P(int n, double t) {
    double P, dP;
    legendre_eval(n, t, P, dP);
    return P;
}

// d/dt P_n(t).
inline double legendre_dP(int n, double t) {
    double P, dP;
    legendre_eval(n, t, P, dP);
    return dP;
}

struct Quadrature1D {
    std::vector<double> nodes;   // on [-1/2, 1/2]
    std::vector<double> weights; // sum to 1
};

// n-point Gauss-Legendre rule, exact for polynomials of degree <= 2n-1.
inline Quadrature1D gauss_nodes(int n) {
    if (n < 1 || n > 10) throw ConfigError("gauss_nodes: n out of range [1,10]");
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev estimate.
        double t = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double P, dP;
            legendre_eval(n, t, P, dP);
            const double dt = P / dP;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double P, dP;
        legendre_eval(n, t, P, dP);
        q.nodes[i] = 0.5 * t;
        q.weights[i] = 1.0 / ((1.0 - t * t) * dP * dP); // standard weight / 2
    }
    return q;
}

// n-point Gauss-Lobatto rule (includes both endpoints), exact for degree
// <= 2n-3.  Endpoint weight is 1/(n(n-1)).
inline Quadrature1D gauss_lobatto_nodes(int n) {
    if (n < 2 || n > 10) throw ConfigError("gauss_lobatto_nodes: n out of range [2,10]");
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    q.nodes[0] = -0.5;
    q.nodes[n - 1] = 0.5;
    for (int i = 1; i < n - 1; ++i) {
        // interior nodes are the roots of P'_{n-1}
        double t = -std::cos(M_PI * i / (n - 1));
        for (int it = 0; it < 100; ++it) {
            double P, dP;
            legendre_eval(n - 1, t, P, dP);
            // Newton on dP using d/dt P'_{n-1} from the Legendre ODE
            const double ddP = (2.0 * t * dP - (n - 1) * n * P) / (1.0 - t * t);
            const double dt = dP / ddP;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        q.nodes[i] = 0.5 * t;
    }
    for (int i = 0; i < n; ++i) {
        const double P = legendre_P(n - 1, 2.0 * q.nodes[i]);
        q.weights[i] = 1.0 / (n * (n - 1) * P * P);
    }
    return q;
}

} // namespace posdiv
