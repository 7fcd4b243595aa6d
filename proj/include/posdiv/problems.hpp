//==============================================================================
// Benchmark problem catalog: initial data, boundary policies, exact
// solutions where available.
//==============================================================================
#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "posdiv/errors.hpp"
#include "posdiv/physics.hpp"

namespace posdiv {

enum class BcKind { Periodic, Outflow, Inflow, InflowSegment };

struct BoundaryPolicy {
    BcKind kind = BcKind::Periodic;
    PrimitiveState state{};          // for inflow
    double seg_lo = 0.0, seg_hi = 0.0; // inflow segment along the side, else outflow
};

using FieldFn = std::function<PrimitiveState(double, double)>;

struct ProblemSpec {
    std::string name;
    double gamma = 5.0 / 3.0;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    int default_nx = 0, default_ny = 0;
    double t_end = 0.0;
    FieldFn initial;
    BoundaryPolicy bc_left, bc_right, bc_bottom, bc_top;
    bool has_exact = false;
    std::function<FieldFn(double)> exact; // t -> field
    double B0 = 0.0, mach = 0.0, p0 = 0.0; // problem parameters where meaningful
};

namespace detail {

inline ProblemSpec make_alfven() {
    ProblemSpec p;
    p.name = "alfven";
    const double alpha = M_PI / 4.0;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    p.xmax = 1.0 / ca;
    p.ymax = 1.0 / sa;
    p.default_nx = p.default_ny = 40;
    p.t_end = 1.0;
    auto field_at = [ca, sa](double beta) {
        const double up = 0.1 * std::sin(2.0 * M_PI * beta);
        const double u3 = 0.1 * std::cos(2.0 * M_PI * beta);
        PrimitiveState v;
        v.rho = 1.0;
        v.u = {-up * sa, up * ca, u3};
        v.B = {ca - up * sa, sa + up * ca, u3};
        v.p = 0.1;
        return v;
    };
    p.initial = [field_at, ca, sa](double x, double y) { return field_at(x * ca + y * sa); };
    p.has_exact = true;
    // The wave runs toward the origin at unit speed, so the profile at time t
    // is the initial one advanced by t along the propagation coordinate.
    p.exact = [field_at, ca, sa](double t) -> FieldFn {
        return [field_at, ca, sa, t](double x, double y) { return field_at(x * ca + y * sa + t); };
    };
    return p;
}

inline ProblemSpec make_vortex() {
    ProblemSpec p;
    p.name = "vortex";
    p.xmin = p.ymin = -10.0;
    p.xmax = p.ymax = 10.0;
    p.default_nx = p.default_ny = 40;
    p.t_end = 0.05;
    const double mu = 5.389489439;
    auto at = [mu](double x, double y) {
        const double r2 = x * x + y * y;
        const double f = std::exp(0.5 * (1.0 - r2));
        PrimitiveState v;
        v.rho = 1.0;
        v.u = {1.0 - mu / std::sqrt(2.0 * M_PI) * f * y, 1.0 + mu / std::sqrt(2.0 * M_PI) * f * x, 0.0};
        v.B = {-mu / (2.0 * M_PI) * f * y, mu / (2.0 * M_PI) * f * x, 0.0};
        v.p = 1.0 - mu * mu * (1.0 + r2) / (8.0 * M_PI * M_PI) * f * f;
        return v;
    };
    p.initial = at;
    p.has_exact = true;
    p.exact = [at](double t) -> FieldFn {
        return [at, t](double x, double y) {
            auto wrap = [](double s) {
                while (s < -10.0) s += 20.0;
                while (s >= 10.0) s -= 20.0;
                return s;
            };
            return at(wrap(x - t), wrap(y - t));
        };
    };
    return p;
}

inline ProblemSpec make_orszag_tang() {
    ProblemSpec p;
    p.name = "orszag_tang";
    p.xmax = p.ymax = 2.0 * M_PI;
    p.default_nx = p.default_ny = 200;
    p.t_end = 0.5;
    const double g = p.gamma;
    p.initial = [g](double x, double y) {
        PrimitiveState v;
        v.rho = g * g;
        v.u = {-std::sin(y), std::sin(x), 0.0};
        v.B = {-std::sin(y), std::sin(2.0 * x), 0.0};
        v.p = g;
        return v;
    };
    return p;
}

inline ProblemSpec make_rotor() {
    ProblemSpec p;
    p.name = "rotor";
    p.default_nx = p.default_ny = 400;
    p.t_end = 0.295;
    const double b = 2.5 / std::sqrt(4.0 * M_PI);
    p.initial = [b](double x, double y) {
        const double r1 = 0.1, r2 = 0.115;
        const double r = std::sqrt((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5));
        PrimitiveState v;
        v.B = {b, 0.0, 0.0};
        v.p = 0.5;
        if (r <= r1) {
            v.rho = 10.0;
            v.u = {-(y - 0.5) / r1, (x - 0.5) / r1, 0.0};
        } else if (r <= r2) {
            const double phi = (r2 - r) / (r2 - r1);
            v.rho = 1.0 + 9.0 * phi;
            v.u = {-phi * (y - 0.5) / r, phi * (x - 0.5) / r, 0.0};
        } else {
            v.rho = 1.0;
            v.u = {0.0, 0.0, 0.0};
        }
        return v;
    };
    return p;
}

inline ProblemSpec make_blast(int variant) {
    ProblemSpec p;
    p.name = variant == 1 ? "blast_i" : (variant == 2 ? "blast_ii" : "blast_iii");
    p.gamma = 1.4;
    p.xmin = p.ymin = -0.5;
    p.xmax = p.ymax = 0.5;
    p.default_nx = p.default_ny = 320;
    double Bx, By;
    if (variant == 1) {
        Bx = 100.0 / std::sqrt(4.0 * M_PI); By = 0.0; p.p0 = 1e3; p.t_end = 0.01;
    } else if (variant == 2) {
        Bx = 1000.0 / std::sqrt(4.0 * M_PI); By = 0.0; p.p0 = 1e4; p.t_end = 0.001;
    } else {
        Bx = By = 100.0 / std::sqrt(8.0 * M_PI); p.p0 = 1e3; p.t_end = 0.01;
    }
    const double pc = p.p0;
    p.initial = [Bx, By, pc](double x, double y) {
        PrimitiveState v;
        v.rho = 1.0;
        v.B = {Bx, By, 0.0};
        v.p = (std::sqrt(x * x + y * y) <= 0.1) ? pc : 0.1;
        return v;
    };
    p.bc_left = p.bc_right = p.bc_bottom = p.bc_top = {BcKind::Outflow};
    return p;
}

inline ProblemSpec make_shock_cloud() {
    ProblemSpec p;
    p.name = "shock_cloud";
    p.default_nx = p.default_ny = 300;
    p.t_end = 0.06;
    PrimitiveState left;
    left.rho = 3.86859;
    left.u = {0, 0, 0};
    left.B = {0.0, 2.1826182, -2.1826182};
    left.p = 167.345;
    PrimitiveState right;
    right.rho = 1.0;
    right.u = {-11.2536, 0, 0};
    right.B = {0.0, 0.56418958, 0.56418958};
    right.p = 1.0;
    p.initial = [left, right](double x, double y) {
        PrimitiveState v = (x < 0.6) ? left : right;
        const double r = std::sqrt((x - 0.8) * (x - 0.8) + (y - 0.5) * (y - 0.5));
        if (x >= 0.6 && r <= 0.15) v.rho = 10.0;
        return v;
    };
    p.bc_left = p.bc_bottom = p.bc_top = {BcKind::Outflow};
    p.bc_right = {BcKind::Inflow, right};
    return p;
}

inline ProblemSpec make_jet(double B0, double mach) {
    ProblemSpec p;
    p.name = "jet_m800";
    p.gamma = 1.4;
    p.xmin = -0.5;
    p.xmax = 0.5;
    p.ymin = 0.0;
    p.ymax = 1.5;
    p.default_nx = 400;
    p.default_ny = 600;
    p.t_end = 0.002;
    p.B0 = B0;
    p.mach = mach;
    const double g = p.gamma;
    p.initial = [g, B0](double, double) {
        PrimitiveState v;
        v.rho = 0.1 * g;
        v.B = {0.0, B0, 0.0};
        v.p = 1.0;
        return v;
    };
    PrimitiveState in;
    in.rho = g;
    in.u = {0.0, mach, 0.0};
    in.B = {0.0, B0, 0.0};
    in.p = 1.0;
    p.bc_left = p.bc_right = p.bc_top = {BcKind::Outflow};
    p.bc_bottom = {BcKind::InflowSegment, in, -0.05, 0.05};
    return p;
}

} // namespace detail

inline ProblemSpec init_problem(const std::string& name, double B0_override = 0.0,
                                double mach_override = 0.0) {
    ProblemSpec p;
    if (name == "alfven") p = detail::make_alfven();
    else if (name == "vortex") p = detail::make_vortex();
    else if (name == "orszag_tang") p = detail::make_orszag_tang();
    else if (name == "rotor") p = detail::make_rotor();
    else if (name == "blast_i") p = detail::make_blast(1);
    else if (name == "blast_ii") p = detail::make_blast(2);
    else if (name == "blast_iii") p = detail::make_blast(3);
    else if (name == "shock_cloud") p = detail::make_shock_cloud();
    else if (name == "jet_m800" || name == "jet")
        p = detail::make_jet(B0_override > 0.0 ? B0_override : std::sqrt(200.0),
                             mach_override > 0.0 ? mach_override : 800.0);
    else throw ConfigError("init_problem: unknown problem '" + name + "'");
    if ((B0_override > 0.0 || mach_override > 0.0) && p.name != "jet_m800")
        throw ConfigError("init_problem: B0/mach overrides only apply to jets");
    return p;
}

inline FieldFn exact_solution(const std::string& name, double t) {
    const ProblemSpec p = init_problem(name);
    if (!p.has_exact)
        throw ConfigError("exact_solution: no exact solution for '" + name + "'");
    return p.exact(t);
}

} // namespace posdiv
