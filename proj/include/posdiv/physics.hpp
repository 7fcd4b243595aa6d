//==============================================================================
// Pointwise ideal-MHD state algebra: conversions, fluxes, admissibility
// (direct and quasi-linearized forms), entropy, and wave-speed bounds.
//
// State layout: U = (rho, m1, m2, m3, B1, B2, B3, E).  The solver splits U
// into R = (rho, m, B3, E) evolved by the central DG update and Q = (B1, B2)
// carried by the divergence-free field; this module is agnostic to the split.
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "posdiv/errors.hpp"

namespace posdiv {

using Vec8 = std::array<double, 8>;
using Mat8 = std::array<std::array<double, 8>, 8>;

// Component indices in a Vec8 conserved or primitive state.
enum UIdx : int { URHO = 0, UM1 = 1, UM2 = 2, UM3 = 3, UB1 = 4, UB2 = 5, UB3 = 6, UE = 7 };

// Indices of the R-subsystem components within U.
inline constexpr int kNumR = 6;
inline constexpr int R_TO_U[kNumR] = {URHO, UM1, UM2, UM3, UB3, UE};

struct GasModel {
    double gamma = 5.0 / 3.0;
};

struct ConservedState {
    double rho = 0.0;
    std::array<double, 3> m{};
    std::array<double, 3> B{};
    double E = 0.0;

    ConservedState() = default;
    ConservedState(double rho_, std::array<double, 3> m_, std::array<double, 3> B_, double E_)
        : rho(rho_), m(m_), B(B_), E(E_) {
        if (!finite()) throw DomainError("ConservedState: non-finite entry");
    }
    explicit ConservedState(const Vec8& u)
        : ConservedState(u[URHO], {u[UM1], u[UM2], u[UM3]}, {u[UB1], u[UB2], u[UB3]}, u[UE]) {}

    Vec8 vec() const { return {rho, m[0], m[1], m[2], B[0], B[1], B[2], E}; }
    bool finite() const {
        for (double v : vec())
            if (!std::isfinite(v)) return false;
        return true;
    }
};

struct PrimitiveState {
    double rho = 0.0;
    std::array<double, 3> u{};
    std::array<double, 3> B{};
    double p = 0.0;
};

struct GqlDirection {
    std::array<double, 3> u_star{};
    std::array<double, 3> B_star{};
};

namespace detail {
inline double dot3(const double* a, const double* b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
} // namespace detail

// rho*e = E - (|m|^2/rho + |B|^2)/2.  The quantity whose positivity defines
// the admissible set together with rho > 0.
inline double internal_energy(const Vec8& u) {
    if (u[URHO] == 0.0) throw DomainError("internal_energy: rho == 0");
    const double m2 = u[UM1] * u[UM1] + u[UM2] * u[UM2] + u[UM3] * u[UM3];
    const double B2 = u[UB1] * u[UB1] + u[UB2] * u[UB2] + u[UB3] * u[UB3];
    return u[UE] - 0.5 * (m2 / u[URHO] + B2);
}
inline double internal_energy(const ConservedState& s) { return internal_energy(s.vec()); }

inline bool is_admissible(const Vec8& u) {
    for (double v : u)
        if (!std::isfinite(v)) return false;
    if (!(u[URHO] > 0.0)) return false;
    return internal_energy(u) > 0.0;
}
inline bool is_admissible(const ConservedState& s) { return is_admissible(s.vec()); }

inline Vec8 prim_to_cons(const PrimitiveState& v, double gamma) {
    if (!(v.rho > 0.0)) throw DomainError("prim_to_cons: rho <= 0");
    const double u2 = detail::dot3(v.u.data(), v.u.data());
    const double B2 = detail::dot3(v.B.data(), v.B.data());
    Vec8 u;
    u[URHO] = v.rho;
    u[UM1] = v.rho * v.u[0];
    u[UM2] = v.rho * v.u[1];
    u[UM3] = v.rho * v.u[2];
    u[UB1] = v.B[0];
    u[UB2] = v.B[1];
    u[UB3] = v.B[2];
    u[UE] = v.p / (gamma - 1.0) + 0.5 * v.rho * u2 + 0.5 * B2;
    return u;
}

inline PrimitiveState cons_to_prim(const Vec8& u, double gamma) {
    const double eint = (u[URHO] != 0.0) ? internal_energy(u) : -1.0;
    if (!(u[URHO] > 0.0) || !(eint > 0.0))
        throw InadmissibleError("cons_to_prim", u[URHO], eint);
    PrimitiveState v;
    v.rho = u[URHO];
    v.u = {u[UM1] / u[URHO], u[UM2] / u[URHO], u[UM3] / u[URHO]};
    v.B = {u[UB1], u[UB2], u[UB3]};
    v.p = (gamma - 1.0) * eint;
    return v;
}

// Flux F_l(U) of the full 8-component system, l in {1,2}.
inline Vec8 flux(const Vec8& u, int dir, double gamma) {
    if (!(u[URHO] > 0.0)) throw DomainError("flux: rho <= 0");
    const double rho = u[URHO];
    const double ul[3] = {u[UM1] / rho, u[UM2] / rho, u[UM3] / rho};
    const double B[3] = {u[UB1], u[UB2], u[UB3]};
    const double m2 = u[UM1] * u[UM1] + u[UM2] * u[UM2] + u[UM3] * u[UM3];
    const double B2 = B[0] * B[0] + B[1] * B[1] + B[2] * B[2];
    const double eint = u[UE] - 0.5 * (m2 / rho + B2);
    const double p = (gamma - 1.0) * eint;
    const double ptot = p + 0.5 * B2;
    const int l = dir - 1;
    const double un = ul[l];
    const double Bn = B[l];
    const double uB = ul[0] * B[0] + ul[1] * B[1] + ul[2] * B[2];

    Vec8 f{};
    f[URHO] = u[UM1 + l];
    for (int i = 0; i < 3; ++i)
        f[UM1 + i] = u[UM1 + l] * ul[i] - Bn * B[i];
    f[UM1 + l] += ptot;
    for (int i = 0; i < 3; ++i)
        f[UB1 + i] = un * B[i] - Bn * ul[i];
    f[UE] = un * (u[UE] + ptot) - Bn * uB;
    return f;
}

// Third component of the electric field -u x B, the quantity driving the
// induction update of the in-plane magnetic field.
inline double electric_field_z(const Vec8& u) {
    if (!(u[URHO] > 0.0)) throw DomainError("electric_field_z: rho <= 0");
    const double u1 = u[UM1] / u[URHO];
    const double u2 = u[UM2] / u[URHO];
    return u[UB1] * u2 - u[UB2] * u1;
}

// (U.n1, U.n* + |B*|^2/2) for the quasi-linearized admissibility constraints,
// with n1 = e_rho and n* = (|u*|^2/2, -u*, -B*, 1).
inline std::array<double, 2> gql_dot(const Vec8& u, const GqlDirection& d) {
    const double us2 = detail::dot3(d.u_star.data(), d.u_star.data());
    const double Bs2 = detail::dot3(d.B_star.data(), d.B_star.data());
    double second = 0.5 * us2 * u[URHO] + u[UE];
    for (int i = 0; i < 3; ++i)
        second -= u[UM1 + i] * d.u_star[i] + u[UB1 + i] * d.B_star[i];
    return {u[URHO], second + 0.5 * Bs2};
}

// Entropy g(U) = -rho log(p rho^-gamma); convex on the admissible set.
inline double entropy_value(const Vec8& u, double gamma) {
    const double eint = (u[URHO] != 0.0) ? internal_energy(u) : -1.0;
    if (!(u[URHO] > 0.0) || !(eint > 0.0))
        throw InadmissibleError("entropy_value", u[URHO], eint);
    const double p = (gamma - 1.0) * eint;
    return -u[URHO] * (std::log(p) - gamma * std::log(u[URHO]));
}

// Gradient of g with respect to the conserved variables.
inline Vec8 entropy_gradient(const Vec8& u, double gamma) {
    const double eint = (u[URHO] != 0.0) ? internal_energy(u) : -1.0;
    if (!(u[URHO] > 0.0) || !(eint > 0.0))
        throw InadmissibleError("entropy_gradient", u[URHO], eint);
    const double rho = u[URHO];
    const double m2 = u[UM1] * u[UM1] + u[UM2] * u[UM2] + u[UM3] * u[UM3];
    const double de_drho = 0.5 * m2 / (rho * rho);
    Vec8 g;
    g[URHO] = -std::log((gamma - 1.0) * eint) - rho * de_drho / eint + gamma * std::log(rho) + gamma;
    for (int i = 0; i < 3; ++i) g[UM1 + i] = u[UM1 + i] / eint;
    for (int i = 0; i < 3; ++i) g[UB1 + i] = rho * u[UB1 + i] / eint;
    g[UE] = -rho / eint;
    return g;
}

// Hessian of g with respect to the conserved variables; symmetric and
// positive definite on the admissible set.
inline Mat8 entropy_hessian(const Vec8& u, double gamma) {
    const double eint = (u[URHO] != 0.0) ? internal_energy(u) : -1.0;
    if (!(u[URHO] > 0.0) || !(eint > 0.0))
        throw InadmissibleError("entropy_hessian", u[URHO], eint);
    const double rho = u[URHO];
    const double e2 = eint * eint;
    const double m[3] = {u[UM1], u[UM2], u[UM3]};
    const double B[3] = {u[UB1], u[UB2], u[UB3]};
    const double m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];

    Mat8 H{};
    H[URHO][URHO] = m2 * m2 / (4.0 * rho * rho * rho * e2) + gamma / rho;
    for (int i = 0; i < 3; ++i) {
        H[URHO][UM1 + i] = -m[i] * m2 / (2.0 * rho * rho * e2);
        H[URHO][UB1 + i] = B[i] / eint - B[i] * m2 / (2.0 * rho * e2);
    }
    H[URHO][UE] = -1.0 / eint + m2 / (2.0 * rho * e2);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            H[UM1 + i][UM1 + j] = m[i] * m[j] / (rho * e2);
            H[UM1 + i][UB1 + j] = m[i] * B[j] / e2;
            H[UB1 + i][UB1 + j] = rho * B[i] * B[j] / e2;
        }
        H[UM1 + i][UM1 + i] += 1.0 / eint;
        H[UB1 + i][UB1 + i] += rho / eint;
        H[UM1 + i][UE] = -m[i] / e2;
        H[UB1 + i][UE] = -rho * B[i] / e2;
    }
    H[UE][UE] = rho / e2;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < i; ++j) H[i][j] = H[j][i];
    return H;
}

namespace detail {
// Directional wave-speed bound entering the flux inequalities.  Note the
// sound-like quantity C_s = p/(rho sqrt(2e)) specific to these bounds.
inline double glf_speed(const Vec8& u, int dir, double gamma) {
    const double rho = u[URHO];
    const double eint = internal_energy(u);
    const double e = eint / rho;
    const double p = (gamma - 1.0) * eint;
    const double Cs = p / (rho * std::sqrt(2.0 * e));
    const double B2 = u[UB1] * u[UB1] + u[UB2] * u[UB2] + u[UB3] * u[UB3];
    const double Bl = u[UB1 + (dir - 1)];
    const double a = Cs * Cs + B2 / rho;
    double disc = a * a - 4.0 * Cs * Cs * Bl * Bl / rho;
    if (disc < 0.0) disc = 0.0;
    return std::sqrt(0.5 * (a + std::sqrt(disc)));
}
} // namespace detail

// alpha_l(U, Ut): the pairwise maximal wave-speed estimate used both in the
// flux inequalities and in the CFL bound of the scheme.
inline double max_wave_speed_pair(const Vec8& u, const Vec8& v, int dir, double gamma) {
    const double ei_u = (u[URHO] > 0.0) ? internal_energy(u) : -1.0;
    if (!(u[URHO] > 0.0) || !(ei_u > 0.0)) throw InadmissibleError("max_wave_speed_pair", u[URHO], ei_u);
    const double ei_v = (v[URHO] > 0.0) ? internal_energy(v) : -1.0;
    if (!(v[URHO] > 0.0) || !(ei_v > 0.0)) throw InadmissibleError("max_wave_speed_pair", v[URHO], ei_v);

    const int l = dir - 1;
    const double ul = u[UM1 + l] / u[URHO];
    const double vl = v[UM1 + l] / v[URHO];
    const double Cu = detail::glf_speed(u, dir, gamma);
    const double Cv = detail::glf_speed(v, dir, gamma);
    const double sru = std::sqrt(u[URHO]);
    const double srv = std::sqrt(v[URHO]);
    const double roe = (sru * ul + srv * vl) / (sru + srv) + std::max(Cu, Cv);
    const double dB1 = u[UB1] - v[UB1];
    const double dB2 = u[UB2] - v[UB2];
    const double dB3 = u[UB3] - v[UB3];
    const double dB = std::sqrt(dB1 * dB1 + dB2 * dB2 + dB3 * dB3);
    const double core = std::max(std::max(std::abs(ul) + Cu, std::abs(vl) + Cv), roe);
    return core + dB / (sru + srv);
}

} // namespace posdiv
