//==============================================================================
// Randomized property suites shared by the test binaries and the `check`
// subcommand: quasi-linearized admissibility, flux inequalities, decomposition
// exactness, divergence-free reconstruction exactness, limiter guarantees.
//==============================================================================
#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "posdiv/cad.hpp"
#include "posdiv/divfree.hpp"
#include "posdiv/limiter.hpp"
#include "posdiv/mesh.hpp"
#include "posdiv/physics.hpp"

namespace posdiv {

struct SuiteResult {
    bool pass = true;
    std::string detail;
    void fail(const std::string& msg) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += msg;
    }
};

inline Vec8 random_admissible(std::mt19937& rng) {
    std::uniform_real_distribution<double> rho(0.1, 3.0), vel(-2.0, 2.0), mag(-2.0, 2.0),
        prs(0.01, 5.0);
    PrimitiveState v;
    v.rho = rho(rng);
    v.u = {vel(rng), vel(rng), vel(rng)};
    v.B = {mag(rng), mag(rng), mag(rng)};
    v.p = prs(rng);
    return prim_to_cons(v, 5.0 / 3.0);
}

//------------------------------------------------------------------------------
// Equivalence of the direct admissibility test and the linear constraints
// over sampled auxiliary directions (the grid includes the analytic
// minimizer u* = m/rho, B* = B, where the second constraint equals rho*e).
inline SuiteResult gql_suite(unsigned seed = 20240901, int ncases = 1000) {
    SuiteResult r;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> any(-2.0, 2.0), en(-1.0, 6.0), dens(-0.5, 2.5);
    int checked = 0;
    for (int t = 0; t < ncases; ++t) {
        Vec8 u;
        u[URHO] = dens(rng);
        for (int c = 1; c < 7; ++c) u[c] = any(rng);
        u[UE] = en(rng);
        const bool direct = is_admissible(u);
        bool sampled = u[URHO] > 0.0;
        if (sampled) {
            std::vector<GqlDirection> dirs;
            dirs.push_back({{u[UM1] / u[URHO], u[UM2] / u[URHO], u[UM3] / u[URHO]},
                            {u[UB1], u[UB2], u[UB3]}});
            for (int s = 0; s < 40; ++s)
                dirs.push_back({{any(rng), any(rng), any(rng)}, {any(rng), any(rng), any(rng)}});
            for (double scale : {-1.0, 0.0, 1.0})
                dirs.push_back({{scale * u[UM1], scale * u[UM2], scale * u[UM3]},
                                {scale * u[UB1], scale * u[UB2], scale * u[UB3]}});
            for (const auto& d : dirs) {
                const auto g = gql_dot(u, d);
                if (!(g[0] > 0.0 && g[1] > 0.0)) {
                    sampled = false;
                    break;
                }
            }
        }
        if (direct != sampled) {
            r.fail("gql mismatch at case " + std::to_string(t));
            return r;
        }
        ++checked;
    }
    r.detail = "gql: " + std::to_string(checked) + " states, direct == sampled";
    return r;
}

//------------------------------------------------------------------------------
inline SuiteResult glf_suite(unsigned seed = 20240902) {
    SuiteResult r;
    std::mt19937 rng(seed);
    const double gamma = 5.0 / 3.0;
    const Vec8 n1 = {1, 0, 0, 0, 0, 0, 0, 0};
    auto dot8 = [](const Vec8& a, const Vec8& b) {
        double s = 0;
        for (int i = 0; i < 8; ++i) s += a[i] * b[i];
        return s;
    };
    // first inequality, strict up to rounding
    for (int t = 0; t < 1000; ++t) {
        const Vec8 u = random_admissible(rng);
        const Vec8 v = random_admissible(rng);
        for (int l = 1; l <= 2; ++l) {
            const double a = max_wave_speed_pair(u, v, l, gamma);
            const Vec8 fu = flux(u, l, gamma), fv = flux(v, l, gamma);
            Vec8 df, sum;
            for (int c = 0; c < 8; ++c) {
                df[c] = fu[c] - fv[c];
                sum[c] = u[c] + v[c];
            }
            const double lhs = -dot8(df, n1);
            const double rhs = -a * dot8(sum, n1);
            const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
            if (!(lhs > rhs - 1e-12 * scale)) {
                r.fail("glf first inequality violated at case " + std::to_string(t));
                return r;
            }
        }
    }
    // second inequality with the magnetic correction term
    std::uniform_real_distribution<double> any(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const Vec8 u = random_admissible(rng);
        const Vec8 v = random_admissible(rng);
        for (int s = 0; s < 50; ++s) {
            GqlDirection d{{any(rng), any(rng), any(rng)}, {any(rng), any(rng), any(rng)}};
            const double uB = d.u_star[0] * d.B_star[0] + d.u_star[1] * d.B_star[1] +
                              d.u_star[2] * d.B_star[2];
            for (int l = 1; l <= 2; ++l) {
                const double a = max_wave_speed_pair(u, v, l, gamma);
                const Vec8 fu = flux(u, l, gamma), fv = flux(v, l, gamma);
                Vec8 df, sum;
                for (int c = 0; c < 8; ++c) {
                    df[c] = fu[c] - fv[c];
                    sum[c] = u[c] + v[c];
                }
                const auto gd = gql_dot(df, d);
                const auto gs = gql_dot(sum, d);
                const double Bs2 = d.B_star[0] * d.B_star[0] + d.B_star[1] * d.B_star[1] +
                                   d.B_star[2] * d.B_star[2];
                const double lhs = -(gd[1] - 0.5 * Bs2); // df . n*
                const double rhs = -a * gs[1] - (u[UB1 + l - 1] - v[UB1 + l - 1]) * uB;
                const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
                if (!(lhs >= rhs - 1e-12 * scale)) {
                    r.fail("glf second inequality violated at case " + std::to_string(t));
                    return r;
                }
            }
        }
    }
    r.detail = "glf: 1000 pairs (first), 200x50 (second), no violations";
    return r;
}

//------------------------------------------------------------------------------
// Decomposition exactness: the weighted node sum reproduces the mean of any
// polynomial of total degree <= k on the reference square.
inline SuiteResult cad_suite(unsigned seed = 20240903) {
    SuiteResult r;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), ratio(0.2, 5.0);
    auto mono_integral = [](int m) { return (m % 2) ? 0.0 : std::pow(0.5, m) / (m + 1); };
    for (CadVariant variant : {CadVariant::CuiDingWu, CadVariant::ZhangShu}) {
        for (int k = 1; k <= 3; ++k) {
            for (int rep = 0; rep < 100; ++rep) {
                const double r1 = ratio(rng), r2 = ratio(rng);
                const CadLayout cad = cad_layout(k, variant, r1, r2);
                if (std::abs(cad.total_weight() - 1.0) > 1e-14) {
                    r.fail("cad weight normalization failed");
                    return r;
                }
                for (const auto& n : cad.internal)
                    if (n.w < 0.0) {
                        r.fail("negative internal weight");
                        return r;
                    }
                std::vector<double> c((k + 1) * (k + 1), 0.0);
                double exact = 0.0, scale = 0.0;
                for (int a = 0; a <= k; ++a)
                    for (int b = 0; b <= k - a; ++b) {
                        c[a * (k + 1) + b] = coef(rng);
                        exact += c[a * (k + 1) + b] * mono_integral(a) * mono_integral(b);
                        scale += std::abs(c[a * (k + 1) + b]);
                    }
                const double got = cad_apply(cad, [&](double x, double y) {
                    double s = 0.0;
                    for (int a = 0; a <= k; ++a)
                        for (int b = 0; b <= k - a; ++b)
                            s += c[a * (k + 1) + b] * std::pow(x, a) * std::pow(y, b);
                    return s;
                });
                if (std::abs(got - exact) > 1e-13 * std::max(1.0, scale)) {
                    r.fail("cad exactness failed (variant " + std::string(to_string(variant)) +
                           ", k=" + std::to_string(k) + ")");
                    return r;
                }
            }
            // antisymmetry of the ratio split
            const CadLayout a = cad_layout(k, variant, 2.0, 0.5);
            const CadLayout b = cad_layout(k, variant, 0.5, 2.0);
            if (std::abs(a.zeta + b.zeta) > 1e-15 || std::abs(a.omega_x - b.omega_y) > 1e-15 ||
                std::abs(a.omega_y - b.omega_x) > 1e-15) {
                r.fail("cad ratio antisymmetry failed");
                return r;
            }
        }
    }
    r.detail = "cad: exactness, normalization and antisymmetry for k=1..3, both variants";
    return r;
}

//------------------------------------------------------------------------------
// Reconstruction reproduces divergence-free vector polynomials of total
// degree <= k fed through their own edge traces.
inline SuiteResult divfree_suite(unsigned seed = 20240904, int k = 2, int ncases = 100) {
    SuiteResult r;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double dx = 0.7, dy = 1.3;
    const CadLayout cad = cad_layout(k, CadVariant::CuiDingWu, 1.0, 1.0);
    const PointLayout layout(k, cad);
    std::vector<double> txi, teta;
    for (int id = 0; id < 4 * (k + 1) * (k + 1); ++id) {
        txi.push_back(layout.xi[id]);
        teta.push_back(layout.eta[id]);
    }
    const DfReconstructor recon(k, dx, dy, txi, teta);

    for (int rep = 0; rep < ncases; ++rep) {
        // random potential of total degree <= k+1 in physical coordinates
        std::vector<double> pc((k + 2) * (k + 2), 0.0);
        for (int a = 0; a <= k + 1; ++a)
            for (int b = 0; b <= k + 1 - a; ++b) pc[a * (k + 2) + b] = coef(rng);
        auto B1 = [&](double x, double y) { // dA/dy
            double s = 0.0;
            for (int a = 0; a <= k + 1; ++a)
                for (int b = 1; b <= k + 1 - a; ++b)
                    s += pc[a * (k + 2) + b] * b * std::pow(x, a) * std::pow(y, b - 1);
            return s;
        };
        auto B2 = [&](double x, double y) { // -dA/dx
            double s = 0.0;
            for (int a = 1; a <= k + 1; ++a)
                for (int b = 0; b <= k + 1 - a; ++b)
                    s -= pc[a * (k + 2) + b] * a * std::pow(x, a - 1) * std::pow(y, b);
            return s;
        };
        const EdgePoly L = project_edge([&](double s) { return B1(-0.5 * dx, s * dy); }, k);
        const EdgePoly R = project_edge([&](double s) { return B1(0.5 * dx, s * dy); }, k);
        const EdgePoly B = project_edge([&](double s) { return B2(s * dx, -0.5 * dy); }, k);
        const EdgePoly T = project_edge([&](double s) { return B2(s * dx, 0.5 * dy); }, k);
        std::vector<double> t1(txi.size()), t2(txi.size());
        double scale = 1.0;
        for (size_t p = 0; p < txi.size(); ++p) {
            t1[p] = B1(txi[p] * dx, teta[p] * dy);
            t2[p] = B2(txi[p] * dx, teta[p] * dy);
            scale = std::max({scale, std::abs(t1[p]), std::abs(t2[p])});
        }
        const DivFreeField f = recon.reconstruct(L, R, B, T, t1, t2);
        std::uniform_real_distribution<double> pt(-0.5, 0.5);
        for (int q = 0; q < 20; ++q) {
            const double xi = pt(rng), eta = pt(rng);
            const double e1 = std::abs(f.eval_B1(xi, eta) - B1(xi * dx, eta * dy));
            const double e2 = std::abs(f.eval_B2(xi, eta) - B2(xi * dx, eta * dy));
            if (e1 > 1e-12 * scale || e2 > 1e-12 * scale) {
                r.fail("reconstruction exactness failed at case " + std::to_string(rep));
                return r;
            }
        }
        const std::vector<double> sx(layout.xi.begin(), layout.xi.end());
        const std::vector<double> sy(layout.eta.begin(), layout.eta.end());
        if (max_pointwise_divergence(f, dx, dy, sx, sy) > 1e-12 * scale) {
            r.fail("reconstructed field not divergence-free");
            return r;
        }
    }
    r.detail = "divfree: " + std::to_string(ncases) + " random degree<=" + std::to_string(k) +
               " fields reproduced from their traces";
    return r;
}

//------------------------------------------------------------------------------
inline SuiteResult limiter_suite(unsigned seed = 20240905) {
    SuiteResult r;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> any(-1.0, 1.0), mix(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const Vec8 avg = random_admissible(rng);
        std::vector<Vec8> raw(12);
        for (auto& u : raw) {
            u = avg;
            for (int c = 0; c < 8; ++c) u[c] += 0.5 * any(rng);
            if (mix(rng) < 0.3) u[URHO] = -0.2 * mix(rng);          // density violation
            if (mix(rng) < 0.3) u[UE] -= 3.0 * mix(rng);            // energy violation
        }
        const auto lim = pp_limit_point_set({raw.data(), raw.size()}, avg);
        for (size_t q = 0; q < raw.size(); ++q) {
            if (!is_admissible(lim.vals[q])) {
                r.fail("limited value inadmissible at case " + std::to_string(t));
                return r;
            }
            if (lim.vals[q][UB1] != raw[q][UB1] || lim.vals[q][UB2] != raw[q][UB2]) {
                r.fail("in-plane magnetic field not preserved bit-exactly");
                return r;
            }
        }
        // idempotence
        const auto lim2 = pp_limit_point_set({lim.vals.data(), lim.vals.size()}, avg);
        for (size_t q = 0; q < raw.size(); ++q)
            for (int c = 0; c < 8; ++c) {
                const double s = std::abs(lim.vals[q][c]) + 1.0;
                if (std::abs(lim2.vals[q][c] - lim.vals[q][c]) > 1e-14 * s) {
                    r.fail("limiter not idempotent at case " + std::to_string(t));
                    return r;
                }
            }
    }
    r.detail = "limiter: 1000 randomized point sets admissible, DF-exact, idempotent";
    return r;
}

} // namespace posdiv
