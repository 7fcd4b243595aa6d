//==============================================================================
// Positivity limiting compatible with the globally divergence-free field,
// and the entropy-induced convex oscillation suppression (COS).
//
// The limiter scales point values toward the admissible composed cell
// average to enforce positive density and internal energy, converts to
// primitive variables, restores the unlimited divergence-free (B1, B2) at
// every node and converts back.  The restored states stay admissible because
// pressure and density are untouched by the restoration.
//==============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "posdiv/errors.hpp"
#include "posdiv/physics.hpp"

namespace posdiv {

inline constexpr double kPpFloor = 1e-13;

struct LimitedPointSet {
    std::vector<Vec8> vals;
    double theta_rho = 1.0;
    double theta_rhoe = 1.0;
};

namespace detail {
// In-place limiting of Q contiguous 8-vectors.  vals[q*8 + c].
inline void pp_limit_inplace(double* vals, int Q, const Vec8& avg, double& theta_rho,
                             double& theta_rhoe) {
    const double rho_bar = avg[URHO];
    const double eint_bar = internal_energy(avg);
    if (!(rho_bar > 0.0) || !(eint_bar > 0.0))
        throw StructuralError("pp_limit: composed cell average left the admissible set (rho=" +
                              std::to_string(rho_bar) + ", rho_e=" + std::to_string(eint_bar) + ")");

    // Step 1: positive density.
    const double eps_rho = std::min(kPpFloor, rho_bar);
    double rho_min = vals[URHO];
    for (int q = 1; q < Q; ++q) rho_min = std::min(rho_min, vals[q * 8 + URHO]);
    theta_rho = 1.0;
    if (rho_min < eps_rho) {
        const double den = rho_bar - rho_min;
        theta_rho = (rho_bar - eps_rho > 0.0 && den > 0.0)
                        ? std::min((rho_bar - eps_rho) / den, 1.0)
                        : 0.0;
        for (int q = 0; q < Q; ++q) {
            double* u = vals + q * 8;
            u[URHO] = (1.0 - theta_rho) * rho_bar + theta_rho * u[URHO];
        }
    }

    // Step 2: positive internal energy, blending the full state.
    const double eps_pe = std::min(kPpFloor, eint_bar);
    double pe_min = 1e300;
    for (int q = 0; q < Q; ++q) {
        const double* u = vals + q * 8;
        const double m2 = u[UM1] * u[UM1] + u[UM2] * u[UM2] + u[UM3] * u[UM3];
        const double B2 = u[UB1] * u[UB1] + u[UB2] * u[UB2] + u[UB3] * u[UB3];
        pe_min = std::min(pe_min, u[UE] - 0.5 * (m2 / u[URHO] + B2));
    }
    theta_rhoe = 1.0;
    if (pe_min < eps_pe) {
        const double den = eint_bar - pe_min;
        theta_rhoe = (eint_bar - eps_pe > 0.0 && den > 0.0)
                         ? std::min((eint_bar - eps_pe) / den, 1.0)
                         : 0.0;
        const double th = theta_rhoe;
        for (int q = 0; q < Q; ++q) {
            double* u = vals + q * 8;
            const double b1 = u[UB1], b2 = u[UB2]; // unlimited divergence-free values
            for (int c = 0; c < 8; ++c) u[c] = (1.0 - th) * avg[c] + th * u[c];
            // Step 3+4: restore (B1,B2) in primitive space; with density,
            // velocity and pressure fixed only the energy shifts.
            u[UE] += 0.5 * (b1 * b1 + b2 * b2 - u[UB1] * u[UB1] - u[UB2] * u[UB2]);
            u[UB1] = b1;
            u[UB2] = b2;
        }
    }
}
} // namespace detail

// Limit a point set against its admissible composed cell average.  The
// (B1,B2) entries of the raw values must be the divergence-free field values
// at the nodes; they are preserved exactly in the output.
inline LimitedPointSet pp_limit_point_set(std::span<const Vec8> raw, const Vec8& avg) {
    LimitedPointSet out;
    out.vals.assign(raw.begin(), raw.end());
    if (out.vals.empty()) return out;
    detail::pp_limit_inplace(out.vals[0].data(), (int)out.vals.size(), avg, out.theta_rho,
                             out.theta_rhoe);
    return out;
}

//------------------------------------------------------------------------------
// COS: entropy-Hessian-weighted mean-square overlap jump, normalized to be
// dimensionless; vanishes when the two meshes agree on the cell.
inline double cos_indicator(std::span<const Vec8> u_self, std::span<const Vec8> u_other,
                            std::span<const double> weights, const Mat8& H, const Vec8& avg) {
    double num = 0.0;
    for (size_t p = 0; p < u_self.size(); ++p) {
        Vec8 d;
        for (int c = 0; c < 8; ++c) d[c] = u_other[p][c] - u_self[p][c];
        double q = 0.0;
        for (int i = 0; i < 8; ++i) {
            double hi = 0.0;
            for (int j = 0; j < 8; ++j) hi += H[i][j] * d[j];
            q += d[i] * hi;
        }
        num += weights[p] * q;
    }
    double den = 0.0;
    for (int i = 0; i < 8; ++i) {
        double hi = 0.0;
        for (int j = 0; j < 8; ++j) hi += H[i][j] * avg[j];
        den += avg[i] * hi;
    }
    den += 1e-300;
    return std::max(num / den, 0.0);
}

// Damp the moments of degree >= 1 of the R polynomial; the zeroth moment and
// the magnetic field are untouched.
inline void cos_damp(double* coeffs, int Nb, const int* degree, double psi, double dt, double h,
                     double c) {
    double factor[kMaxK + 1];
    factor[0] = 1.0;
    for (int d = 1; d <= kMaxK; ++d) factor[d] = std::exp(-(dt / h) * c * d * psi);
    for (int comp = 0; comp < kNumR; ++comp)
        for (int l = 0; l < Nb; ++l) coeffs[comp * Nb + l] *= factor[degree[l]];
}

} // namespace posdiv
