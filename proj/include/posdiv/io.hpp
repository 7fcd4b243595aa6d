//==============================================================================
// Field output (csv / legacy VTK), error norms, convergence orders and the
// per-step diagnostics log.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "posdiv/errors.hpp"
#include "posdiv/physics.hpp"
#include "posdiv/solver.hpp"

namespace posdiv {

// Discrete norms over cell-center samples: l1 is the mean absolute error,
// l2 the root mean square, linf the maximum.
struct ErrorNorms {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

inline ErrorNorms error_norms(const std::vector<double>& numeric,
                              const std::vector<double>& exact) {
    if (numeric.size() != exact.size() || numeric.empty())
        throw ConfigError("error_norms: field shape mismatch");
    ErrorNorms n;
    for (size_t i = 0; i < numeric.size(); ++i) {
        const double e = std::abs(numeric[i] - exact[i]);
        n.l1 += e;
        n.l2 += e * e;
        n.linf = std::max(n.linf, e);
    }
    n.l1 /= (double)numeric.size();
    n.l2 = std::sqrt(n.l2 / (double)numeric.size());
    return n;
}

inline double convergence_order(double err_coarse, double err_fine) {
    if (!(err_fine > 0.0) || !(err_coarse > 0.0))
        throw ConfigError("convergence_order: zero error, order undefined");
    return std::log2(err_coarse / err_fine);
}

//------------------------------------------------------------------------------
// Structured cell-center samples of the primal solution plus derived fields.
struct FieldDump {
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, dx = 0, dy = 0;
    // row-major [j][i], 15 columns in fixed order
    std::vector<std::array<double, 15>> rows;

    static constexpr const char* kHeader =
        "x,y,rho,u1,u2,u3,B1,B2,B3,p,p_m,mach,log10_rho,div_b,normal_jump";
};

inline FieldDump make_dump(const CdgSolver& solver) {
    const MeshPair& m = solver.mesh();
    FieldDump d;
    d.nx = m.nx;
    d.ny = m.ny;
    d.x0 = m.x0;
    d.y0 = m.y0;
    d.dx = m.dx;
    d.dy = m.dy;
    d.rows.reserve((size_t)m.nx * m.ny);
    const double gamma = solver.problem().gamma;
    const TensorBasis tb(solver.config().k + 1);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            const Vec8 u = solver.sample_primal(i, j);
            const PrimitiveState v = cons_to_prim(u, gamma);
            const double B2 = v.B[0] * v.B[0] + v.B[1] * v.B[1] + v.B[2] * v.B[2];
            const double c = std::sqrt(gamma * v.p / v.rho);
            const double speed = std::sqrt(v.u[0] * v.u[0] + v.u[1] * v.u[1] + v.u[2] * v.u[2]);
            const DivFreeField& f = solver.state().C.field[m.pidx(i, j)];
            std::array<double, kMaxPotCoef> d1{}, d2{};
            tb.dxi_coeffs(f.B1.data(), d1.data());
            tb.deta_coeffs(f.B2.data(), d2.data());
            double divb = 0.0;
            const int n2 = (solver.config().k + 2) * (solver.config().k + 2);
            for (int q = 0; q < n2; ++q) divb = std::max(divb, std::abs(d1[q] / m.dx + d2[q] / m.dy));
            const double jump = 0.0; // per-cell jump is reported by the audit log
            d.rows.push_back({m.x0 + (i + 0.5) * m.dx, m.y0 + (j + 0.5) * m.dy, v.rho, v.u[0],
                              v.u[1], v.u[2], v.B[0], v.B[1], v.B[2], v.p, 0.5 * B2, speed / c,
                              std::log10(v.rho), divb, jump});
        }
    return d;
}

inline void write_csv(const FieldDump& d, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("write_csv: cannot open " + path);
    std::fprintf(f, "%s\n", FieldDump::kHeader);
    for (const auto& r : d.rows) {
        for (size_t c = 0; c < r.size(); ++c)
            std::fprintf(f, c + 1 < r.size() ? "%.17g," : "%.17g\n", r[c]);
    }
    std::fclose(f);
}

inline void write_vtk(const FieldDump& d, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("write_vtk: cannot open " + path);
    std::fprintf(f, "# vtk DataFile Version 3.0\nposdiv field dump\nASCII\n");
    std::fprintf(f, "DATASET STRUCTURED_POINTS\nDIMENSIONS %d %d 1\n", d.nx, d.ny);
    std::fprintf(f, "ORIGIN %.17g %.17g 0\nSPACING %.17g %.17g 1\n", d.x0 + 0.5 * d.dx,
                 d.y0 + 0.5 * d.dy, d.dx, d.dy);
    std::fprintf(f, "POINT_DATA %d\n", d.nx * d.ny);
    static const char* names[] = {"rho", "u1", "u2",  "u3",        "B1",    "B2",         "B3",
                                  "p",   "p_m", "mach", "log10_rho", "div_b", "normal_jump"};
    for (int c = 0; c < 13; ++c) {
        std::fprintf(f, "SCALARS %s double 1\nLOOKUP_TABLE default\n", names[c]);
        for (const auto& r : d.rows) std::fprintf(f, "%.17g\n", r[c + 2]);
    }
    std::fclose(f);
}

//------------------------------------------------------------------------------
inline void append_diagnostics(const std::string& path, const StepDiagnostics& d) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("diagnostics log: cannot open " + path);
    char line[512];
    std::snprintf(line, sizeof line,
                  "step=%ld t=%.12g dt=%.12g theta=%.12g alpha1=%.12g alpha2=%.12g "
                  "min_rho=%.12g min_eint=%.12g max_divb=%.3e max_jump=%.3e "
                  "energy_drift=%.3e mass_drift=%.3e",
                  d.step, d.t, d.dt, d.theta, d.alpha1, d.alpha2, d.min_rho, d.min_eint,
                  d.max_divb, d.max_jump, d.energy_drift, d.mass_drift);
    out << line << "\n";
}

// Sampled component fields (cell centers) for error measurement.
inline std::vector<double> sample_component(const CdgSolver& solver, int comp) {
    const MeshPair& m = solver.mesh();
    std::vector<double> out;
    out.reserve((size_t)m.nx * m.ny);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) out.push_back(solver.sample_primal(i, j)[comp]);
    return out;
}

inline std::vector<double> sample_exact_component(const MeshPair& m, const FieldFn& exact,
                                                  double gamma, int comp) {
    std::vector<double> out;
    out.reserve((size_t)m.nx * m.ny);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            const double x = m.x0 + (i + 0.5) * m.dx;
            const double y = m.y0 + (j + 0.5) * m.dy;
            out.push_back(prim_to_cons(exact(x, y), gamma)[comp]);
        }
    return out;
}

} // namespace posdiv
