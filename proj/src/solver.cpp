//==============================================================================
// Central DG solver implementation.
//
// Geometry conventions (0-based): primal cell (i,j) covers
// [x0+i dx, x0+(i+1) dx] x [y0+j dy, y0+(j+1) dy]; dual cell (i,j) is the
// same box shifted by (-dx/2, -dy/2), centered on the primal corner.  For a
// cell of either mesh, the overlapping cell of the *other* mesh under its
// quadrant (qx,qy) has logical index (i+base+qx, j+base+qy) with base = 0
// when viewed from the primal mesh and base = -1 from the dual mesh, and a
// point with reference coordinates (xi,eta) in this cell sits at reference
// coordinates shifted by half a cell in that neighbor.  All cross-mesh
// fetches below rely on this aliasing: half-interval Gauss nodes, boundary
// stations, vertices and quadrant-internal nodes all map onto the identical
// layout slots of the neighbor.
//==============================================================================
#include "posdiv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "posdiv/parallel.hpp"

namespace posdiv {

namespace {

inline double dotn(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// Paired summation over a half-interval node set: accumulates mirror-image
// node pairs first so the result is bitwise invariant under x-reflection of
// the data.  Index pairs are (h,mu) <-> (1-h, N-1-mu).
struct SymSum {
    double v = 0.0;
    void add_pair(double a, double b) { v += a + b; }
    void add(double a) { v += a; }
};

inline double gfun(const double* u) {
    return (u[UB1] * u[UM2] - u[UB2] * u[UM1]) / u[URHO];
}

// Both flux directions at once; caller guarantees admissibility.
inline void flux_both(const double* u, double gamma, double* f1, double* f2) {
    const double rho = u[URHO];
    const double inv = 1.0 / rho;
    const double v1 = u[UM1] * inv, v2 = u[UM2] * inv, v3 = u[UM3] * inv;
    const double B1 = u[UB1], B2 = u[UB2], B3 = u[UB3];
    const double B2sum = B1 * B1 + B2 * B2 + B3 * B3;
    const double kin = 0.5 * (u[UM1] * v1 + u[UM2] * v2 + u[UM3] * v3);
    const double p = (gamma - 1.0) * (u[UE] - kin - 0.5 * B2sum);
    const double ptot = p + 0.5 * B2sum;
    const double uB = v1 * B1 + v2 * B2 + v3 * B3;

    f1[URHO] = u[UM1];
    f1[UM1] = u[UM1] * v1 - B1 * B1 + ptot;
    f1[UM2] = u[UM1] * v2 - B1 * B2;
    f1[UM3] = u[UM1] * v3 - B1 * B3;
    f1[UB1] = 0.0;
    f1[UB2] = v1 * B2 - B1 * v2;
    f1[UB3] = v1 * B3 - B1 * v3;
    f1[UE] = v1 * (u[UE] + ptot) - B1 * uB;

    f2[URHO] = u[UM2];
    f2[UM1] = u[UM2] * v1 - B2 * B1;
    f2[UM2] = u[UM2] * v2 - B2 * B2 + ptot;
    f2[UM3] = u[UM2] * v3 - B2 * B3;
    f2[UB1] = v2 * B1 - B2 * v1;
    f2[UB2] = 0.0;
    f2[UB3] = v2 * B3 - B2 * v3;
    f2[UE] = v2 * (u[UE] + ptot) - B2 * uB;
}

} // namespace

//------------------------------------------------------------------------------
TimeStepInfo compute_dt_info(double alpha1, double alpha2, double dx, double dy,
                             double t_remaining, const SolverConfig& cfg) {
    TimeStepInfo info;
    info.alpha1 = alpha1;
    info.alpha2 = alpha2;
    const double sum = alpha1 / dx + alpha2 / dy;
    if (cfg.cad_variant == CadVariant::ZhangShu) {
        const int L = (cfg.k + 4) / 2;
        info.omega_star = 1.0 / (L * (L - 1));
    } else {
        const double zeta = (sum > 0.0) ? (alpha1 / dx - alpha2 / dy) / sum : 0.0;
        info.omega_star = cdw_omega_star(cfg.k, zeta);
    }
    if (!(sum > 0.0)) {
        if (!(t_remaining > 0.0)) throw StructuralError("compute_dt: stagnation");
        info.dt = t_remaining;
        info.tau_max = t_remaining;
        info.theta = 1.0;
        return info;
    }
    info.tau_max = cfg.cfl_nu / sum;
    double dt = std::min(info.tau_max, t_remaining);
    if (cfg.pp_bound) dt = std::min(dt, 0.5 * cfg.theta_cap * info.omega_star / sum);
    if (!(dt > 0.0)) throw StructuralError("compute_dt: stagnation (no positive step)");
    info.dt = dt;
    info.theta = dt / info.tau_max;
    return info;
}

//------------------------------------------------------------------------------
CdgSolver::CdgSolver(const ProblemSpec& prob, const MeshPair& mesh, const SolverConfig& cfg)
    : prob_(prob), mesh_(mesh), cfg_(cfg), gamma_(prob.gamma), basis_(cfg.k) {
    Nb_ = basis_.Nb;
    N_ = cfg_.k + 1;
    n_ = cfg_.k + 2;
    n2_ = n_ * n_;
    const bool px = prob_.bc_left.kind == BcKind::Periodic;
    const bool py = prob_.bc_bottom.kind == BcKind::Periodic;
    if (px != (prob_.bc_right.kind == BcKind::Periodic) ||
        py != (prob_.bc_top.kind == BcKind::Periodic))
        throw ConfigError("periodic boundaries must come in pairs");

    rebuild_layout(1.0, 1.0);
    std::vector<double> txi, teta;
    for (int id = 0; id < 4 * N_ * N_; ++id) {
        txi.push_back(layout_.xi[id]);
        teta.push_back(layout_.eta[id]);
    }
    recon_ = DfReconstructor(cfg_.k, mesh_.dx, mesh_.dy, txi, teta);

    state_.C.R.assign((size_t)mesh_.pcount() * kNumR * Nb_, 0.0);
    state_.C.field.assign(mesh_.pcount(), DivFreeField{});
    state_.C.aux.assign(mesh_.pcount(), {0.0, 0.0});
    state_.D.R.assign((size_t)mesh_.dcount() * kNumR * Nb_, 0.0);
    state_.D.field.assign(mesh_.dcount(), DivFreeField{});
    state_.D.aux.assign(mesh_.dcount(), {0.0, 0.0});
    state_.bxP.assign(mesh_.bxP_count(), EdgePoly{N_});
    state_.byP.assign(mesh_.byP_count(), EdgePoly{N_});
    state_.bxD.assign(mesh_.bxD_count(), EdgePoly{N_});
    state_.byD.assign(mesh_.byD_count(), EdgePoly{N_});

    limC_.assign((size_t)mesh_.pcount() * layout_.M * 8, 0.0);
    limD_.assign((size_t)mesh_.dcount() * layout_.M * 8, 0.0);
    avgC_.assign(mesh_.pcount(), Vec8{});
    avgD_.assign(mesh_.dcount(), Vec8{});
    thrC_.assign(mesh_.pcount(), 1.0);
    threC_.assign(mesh_.pcount(), 1.0);
    thrD_.assign(mesh_.dcount(), 1.0);
    threD_.assign(mesh_.dcount(), 1.0);
    psiC_.assign(mesh_.pcount(), 0.0);
    psiD_.assign(mesh_.dcount(), 0.0);
}

void CdgSolver::rebuild_layout(double r1, double r2) {
    cad_ = cad_layout(cfg_.k, cfg_.cad_variant, r1, r2);
    layout_ = PointLayout(cfg_.k, cad_);
    build_tables();
}

void CdgSolver::build_tables() {
    const int M = layout_.M;
    tabR_.assign((size_t)M * Nb_, 0.0);
    tabT_.assign((size_t)M * n2_, 0.0);
    for (int id = 0; id < M; ++id) {
        const double xi = layout_.xi[id], eta = layout_.eta[id];
        for (int l = 0; l < Nb_; ++l) tabR_[id * Nb_ + l] = basis_.eval(l, xi, eta);
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                tabT_[id * n2_ + a * n_ + b] = legendre_P(a, 2.0 * xi) * legendre_P(b, 2.0 * eta);
    }
    const int T = 4 * N_ * N_;
    dgx_.assign((size_t)T * Nb_, 0.0);
    dgy_.assign((size_t)T * Nb_, 0.0);
    for (int id = 0; id < T; ++id) {
        const double xi = layout_.xi[id], eta = layout_.eta[id];
        for (int l = 0; l < Nb_; ++l) {
            dgx_[id * Nb_ + l] = basis_.dxi(l, xi, eta);
            dgy_[id * Nb_ + l] = basis_.deta(l, xi, eta);
        }
    }
    edgeP_.assign((size_t)2 * N_ * N_, 0.0);
    edgedP_.assign((size_t)2 * N_ * N_, 0.0);
    for (int h = 0; h < 2; ++h)
        for (int nu = 0; nu < N_; ++nu) {
            const double sig = layout_.hnode(h, nu);
            for (int m = 0; m < N_; ++m) {
                edgeP_[(h * N_ + nu) * N_ + m] = legendre_P(m, 2.0 * sig);
                edgedP_[(h * N_ + nu) * N_ + m] = legendre_dP(m, 2.0 * sig);
            }
        }
}

//------------------------------------------------------------------------------
// Initialization
//------------------------------------------------------------------------------
void CdgSolver::project_initial() {
    auto Rof = [this](double x, double y) {
        const Vec8 u = prim_to_cons(prob_.initial(x, y), gamma_);
        std::array<double, kNumR> r;
        for (int c = 0; c < kNumR; ++c) r[c] = u[R_TO_U[c]];
        return r;
    };
    const Quadrature1D q6 = gauss_nodes(6);
    auto project_cell = [&](const CellRect& rect, double* Rc, std::array<double, 2>& aux) {
        for (int c = 0; c < kNumR * Nb_; ++c) Rc[c] = 0.0;
        aux = {0.0, 0.0};
        for (int ix = 0; ix < 6; ++ix)
            for (int iy = 0; iy < 6; ++iy) {
                const double xi = q6.nodes[ix], eta = q6.nodes[iy];
                const double w = q6.weights[ix] * q6.weights[iy];
                const double x = rect.xc + xi * rect.dx, y = rect.yc + eta * rect.dy;
                const auto r = Rof(x, y);
                const Vec8 u = prim_to_cons(prob_.initial(x, y), gamma_);
                for (int l = 0; l < Nb_; ++l) {
                    const double phi = basis_.eval(l, xi, eta) * basis_.inv_mass[l] * w;
                    for (int c = 0; c < kNumR; ++c) Rc[c * Nb_ + l] += phi * r[c];
                }
                aux[0] += w * u[UB1];
                aux[1] += w * u[UB2];
            }
    };
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            const int c = mesh_.pidx(i, j);
            project_cell(mesh_.primal_rect(i, j), &state_.C.R[(size_t)c * kNumR * Nb_],
                         state_.C.aux[c]);
        }
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) {
            const int c = mesh_.didx(i, j);
            project_cell(mesh_.dual_rect(i, j), &state_.D.R[(size_t)c * kNumR * Nb_],
                         state_.D.aux[c]);
        }
}

void CdgSolver::init_edges_and_fields() {
    auto B1of = [this](double x, double y) { return prim_to_cons(prob_.initial(x, y), gamma_)[UB1]; };
    auto B2of = [this](double x, double y) { return prim_to_cons(prob_.initial(x, y), gamma_)[UB2]; };

    // primal edges
    for (int s = 0; s <= mesh_.nx; ++s)
        for (int j = 0; j < mesh_.ny; ++j) {
            const double xe = mesh_.x0 + s * mesh_.dx;
            const double yc = mesh_.y0 + (j + 0.5) * mesh_.dy;
            state_.bxP[mesh_.bxP_idx(s, j)] =
                project_edge([&](double sig) { return B1of(xe, yc + sig * mesh_.dy); }, cfg_.k);
        }
    for (int i = 0; i < mesh_.nx; ++i)
        for (int t = 0; t <= mesh_.ny; ++t) {
            const double ye = mesh_.y0 + t * mesh_.dy;
            const double xc = mesh_.x0 + (i + 0.5) * mesh_.dx;
            state_.byP[mesh_.byP_idx(i, t)] =
                project_edge([&](double sig) { return B2of(xc + sig * mesh_.dx, ye); }, cfg_.k);
        }
    // dual edges
    for (int m = 0; m <= mesh_.nx + 1; ++m)
        for (int r = 0; r <= mesh_.ny; ++r) {
            const double xe = mesh_.x0 + (m - 0.5) * mesh_.dx;
            const double yc = mesh_.y0 + r * mesh_.dy;
            state_.bxD[mesh_.bxD_idx(m, r)] =
                project_edge([&](double sig) { return B1of(xe, yc + sig * mesh_.dy); }, cfg_.k);
        }
    for (int i = 0; i <= mesh_.nx; ++i)
        for (int t = 0; t <= mesh_.ny + 1; ++t) {
            const double ye = mesh_.y0 + (t - 0.5) * mesh_.dy;
            const double xc = mesh_.x0 + i * mesh_.dx;
            state_.byD[mesh_.byD_idx(i, t)] =
                project_edge([&](double sig) { return B2of(xc + sig * mesh_.dx, ye); }, cfg_.k);
        }

    // in-cell fields from edge traces, fitting the exact initial field inside
    const int T = 4 * N_ * N_;
    std::vector<double> t1(T), t2(T);
    auto build = [&](const CellRect& rect, const EdgePoly& L, const EdgePoly& R,
                     const EdgePoly& B, const EdgePoly& Tp) {
        for (int id = 0; id < T; ++id) {
            const double x = rect.xc + layout_.xi[id] * rect.dx;
            const double y = rect.yc + layout_.eta[id] * rect.dy;
            t1[id] = B1of(x, y);
            t2[id] = B2of(x, y);
        }
        return recon_.reconstruct(L, R, B, Tp, t1, t2);
    };
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i)
            state_.C.field[mesh_.pidx(i, j)] =
                build(mesh_.primal_rect(i, j), state_.bxP[mesh_.bxP_idx(i, j)],
                      state_.bxP[mesh_.bxP_idx(i + 1, j)], state_.byP[mesh_.byP_idx(i, j)],
                      state_.byP[mesh_.byP_idx(i, j + 1)]);
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i)
            state_.D.field[mesh_.didx(i, j)] =
                build(mesh_.dual_rect(i, j), state_.bxD[mesh_.bxD_idx(i, j)],
                      state_.bxD[mesh_.bxD_idx(i + 1, j)], state_.byD[mesh_.byD_idx(i, j)],
                      state_.byD[mesh_.byD_idx(i, j + 1)]);
}

void CdgSolver::initialize() {
    project_initial();
    init_edges_and_fields();
    fill_ghosts(state_);
    compute_averages(state_);
    audit_averages("initialization");
    const auto t = current_totals();
    totals0_ = t;
    diag_ = StepDiagnostics{};
}

//------------------------------------------------------------------------------
// Ghost filling
//------------------------------------------------------------------------------
namespace {
struct GhostSrc {
    bool inflow = false;
    PrimitiveState state;
    int si = 0, sj = 0;
    bool pure_wrap = true;
};
} // namespace

void CdgSolver::fill_ghosts(SolverState& s) const {
    const int nx = mesh_.nx, ny = mesh_.ny;
    const bool perx = prob_.bc_left.kind == BcKind::Periodic;
    const bool pery = prob_.bc_bottom.kind == BcKind::Periodic;

    auto side_inflow = [&](const BoundaryPolicy& bp, double coord, bool& inflow,
                           PrimitiveState& st) {
        if (bp.kind == BcKind::Inflow) { inflow = true; st = bp.state; }
        else if (bp.kind == BcKind::InflowSegment && coord >= bp.seg_lo && coord <= bp.seg_hi) {
            inflow = true;
            st = bp.state;
        }
    };
    auto classify = [&](int i, int j) {
        GhostSrc g;
        g.si = i; g.sj = j;
        const double cx = mesh_.x0 + (i + 0.5) * mesh_.dx;
        const double cy = mesh_.y0 + (j + 0.5) * mesh_.dy;
        if (i < 0 || i >= nx) {
            if (perx) g.si = (i + nx) % nx;
            else {
                g.pure_wrap = false;
                side_inflow(i < 0 ? prob_.bc_left : prob_.bc_right, cy, g.inflow, g.state);
                g.si = std::clamp(i, 0, nx - 1);
            }
        }
        if (j < 0 || j >= ny) {
            if (pery) g.sj = (j + ny) % ny;
            else {
                g.pure_wrap = false;
                side_inflow(j < 0 ? prob_.bc_bottom : prob_.bc_top, cx, g.inflow, g.state);
                g.sj = std::clamp(j, 0, ny - 1);
            }
        }
        return g;
    };

    // --- cells: R and aux ---
    for (int j = -1; j <= ny; ++j)
        for (int i = -1; i <= nx; ++i) {
            if (i >= 0 && i < nx && j >= 0 && j < ny) continue;
            const GhostSrc g = classify(i, j);
            const int dst = mesh_.pidx(i, j);
            if (g.inflow) {
                const Vec8 u = prim_to_cons(g.state, gamma_);
                double* Rc = &s.C.R[(size_t)dst * kNumR * Nb_];
                for (int c = 0; c < kNumR * Nb_; ++c) Rc[c] = 0.0;
                for (int c = 0; c < kNumR; ++c) Rc[c * Nb_] = u[R_TO_U[c]];
                s.C.aux[dst] = {u[UB1], u[UB2]};
            } else {
                const int src = mesh_.pidx(g.si, g.sj);
                std::memcpy(&s.C.R[(size_t)dst * kNumR * Nb_], &s.C.R[(size_t)src * kNumR * Nb_],
                            sizeof(double) * kNumR * Nb_);
                s.C.aux[dst] = s.C.aux[src];
            }
        }

    // --- edges ---
    if (!pery) {
        // ghost rows below/above: vertical edges first, then horizontal ones
        // with a constant shift that closes each ghost cell's loop exactly.
        for (int s0 = 0; s0 <= nx; ++s0) {
            const double xe = mesh_.x0 + s0 * mesh_.dx;
            for (int side = 0; side < 2; ++side) {
                const int jg = side == 0 ? -1 : ny;
                const int jr = side == 0 ? 0 : ny - 1;
                bool inflow = false;
                PrimitiveState st;
                side_inflow(side == 0 ? prob_.bc_bottom : prob_.bc_top, xe, inflow, st);
                EdgePoly e;
                e.N = N_;
                if (inflow) e.c[0] = prim_to_cons(st, gamma_)[UB1];
                else e = s.bxP[mesh_.bxP_idx(s0, jr)];
                s.bxP[mesh_.bxP_idx(s0, jg)] = e;
            }
        }
        for (int i = 0; i < nx; ++i) {
            const double xc = mesh_.x0 + (i + 0.5) * mesh_.dx;
            for (int side = 0; side < 2; ++side) {
                const int tg = side == 0 ? -1 : ny + 1;
                const int tr = side == 0 ? 0 : ny;
                bool inflow = false;
                PrimitiveState st;
                side_inflow(side == 0 ? prob_.bc_bottom : prob_.bc_top, xc, inflow, st);
                EdgePoly e;
                e.N = N_;
                if (inflow) e.c[0] = prim_to_cons(st, gamma_)[UB2];
                else e = s.byP[mesh_.byP_idx(i, tr)];
                // close the ghost cell (i, jg)
                const int jg = side == 0 ? -1 : ny;
                const EdgePoly& L = s.bxP[mesh_.bxP_idx(i, jg)];
                const EdgePoly& R = s.bxP[mesh_.bxP_idx(i + 1, jg)];
                if (side == 0) {
                    const EdgePoly& T = s.byP[mesh_.byP_idx(i, 0)];
                    const double res = compatibility_residual(L, R, e, T, mesh_.dx, mesh_.dy);
                    e.c[0] += res / mesh_.dx;
                } else {
                    const EdgePoly& B = s.byP[mesh_.byP_idx(i, ny)];
                    const double res = compatibility_residual(L, R, B, e, mesh_.dx, mesh_.dy);
                    e.c[0] -= res / mesh_.dx;
                }
                s.byP[mesh_.byP_idx(i, tg)] = e;
            }
        }
    } else {
        for (int s0 = 0; s0 <= nx; ++s0) {
            s.bxP[mesh_.bxP_idx(s0, -1)] = s.bxP[mesh_.bxP_idx(s0, ny - 1)];
            s.bxP[mesh_.bxP_idx(s0, ny)] = s.bxP[mesh_.bxP_idx(s0, 0)];
        }
        for (int i = 0; i < nx; ++i) {
            s.byP[mesh_.byP_idx(i, -1)] = s.byP[mesh_.byP_idx(i, ny - 1)];
            s.byP[mesh_.byP_idx(i, ny + 1)] = s.byP[mesh_.byP_idx(i, 1)];
        }
    }

    if (!perx) {
        // base copies / inflow data for the side columns of both families
        for (int j = -1; j <= ny; ++j) {
            const double yc = mesh_.y0 + (j + 0.5) * mesh_.dy;
            for (int side = 0; side < 2; ++side) {
                const int sg = side == 0 ? -1 : nx + 1;
                const int sr = side == 0 ? 0 : nx;
                bool inflow = false;
                PrimitiveState st;
                side_inflow(side == 0 ? prob_.bc_left : prob_.bc_right, yc, inflow, st);
                EdgePoly e;
                e.N = N_;
                if (inflow) e.c[0] = prim_to_cons(st, gamma_)[UB1];
                else e = s.bxP[mesh_.bxP_idx(sr, j)];
                s.bxP[mesh_.bxP_idx(sg, j)] = e;
            }
        }
        for (int t = -1; t <= ny + 1; ++t) {
            const double yc = mesh_.y0 + (t - 0.5) * mesh_.dy;
            for (int side = 0; side < 2; ++side) {
                const int ig = side == 0 ? -1 : nx;
                const int ir = side == 0 ? 0 : nx - 1;
                bool inflow = false;
                PrimitiveState st;
                side_inflow(side == 0 ? prob_.bc_left : prob_.bc_right, yc, inflow, st);
                EdgePoly e;
                e.N = N_;
                if (inflow) e.c[0] = prim_to_cons(st, gamma_)[UB2];
                else e = s.byP[mesh_.byP_idx(ir, t)];
                s.byP[mesh_.byP_idx(ig, t)] = e;
            }
        }
        // shift the outermost vertical edge of every side ghost cell so its
        // loop closes exactly
        for (int j = -1; j <= ny; ++j) {
            for (int side = 0; side < 2; ++side) {
                const int sg = side == 0 ? -1 : nx + 1;
                const int ig = side == 0 ? -1 : nx;
                EdgePoly e = s.bxP[mesh_.bxP_idx(sg, j)];
                const EdgePoly& B = s.byP[mesh_.byP_idx(ig, j)];
                const EdgePoly& T = s.byP[mesh_.byP_idx(ig, j + 1)];
                if (side == 0) {
                    const EdgePoly& R = s.bxP[mesh_.bxP_idx(0, j)];
                    const double res = compatibility_residual(e, R, B, T, mesh_.dx, mesh_.dy);
                    e.c[0] += res / mesh_.dy;
                } else {
                    const EdgePoly& L = s.bxP[mesh_.bxP_idx(nx, j)];
                    const double res = compatibility_residual(L, e, B, T, mesh_.dx, mesh_.dy);
                    e.c[0] -= res / mesh_.dy;
                }
                s.bxP[mesh_.bxP_idx(sg, j)] = e;
            }
        }
    } else {
        for (int j = -1; j <= ny; ++j) {
            s.bxP[mesh_.bxP_idx(-1, j)] = s.bxP[mesh_.bxP_idx(nx - 1, j)];
            s.bxP[mesh_.bxP_idx(nx + 1, j)] = s.bxP[mesh_.bxP_idx(1, j)];
        }
        for (int t = -1; t <= ny + 1; ++t) {
            s.byP[mesh_.byP_idx(-1, t)] = s.byP[mesh_.byP_idx(nx - 1, t)];
            s.byP[mesh_.byP_idx(nx, t)] = s.byP[mesh_.byP_idx(0, t)];
        }
    }

    // --- ghost fields ---
    const int T = 4 * N_ * N_;
    std::vector<double> t1(T), t2(T);
    for (int j = -1; j <= ny; ++j)
        for (int i = -1; i <= nx; ++i) {
            if (i >= 0 && i < nx && j >= 0 && j < ny) continue;
            const GhostSrc g = classify(i, j);
            const int dst = mesh_.pidx(i, j);
            if (g.pure_wrap) {
                s.C.field[dst] = s.C.field[mesh_.pidx(g.si, g.sj)];
                continue;
            }
            if (g.inflow) {
                const Vec8 u = prim_to_cons(g.state, gamma_);
                std::fill(t1.begin(), t1.end(), u[UB1]);
                std::fill(t2.begin(), t2.end(), u[UB2]);
            } else {
                const DivFreeField& f = s.C.field[mesh_.pidx(g.si, g.sj)];
                for (int id = 0; id < T; ++id) {
                    t1[id] = dotn(f.B1.data(), &tabT_[(size_t)id * n2_], n2_);
                    t2[id] = dotn(f.B2.data(), &tabT_[(size_t)id * n2_], n2_);
                }
            }
            s.C.field[dst] = recon_.reconstruct(
                s.bxP[mesh_.bxP_idx(i, j)], s.bxP[mesh_.bxP_idx(i + 1, j)],
                s.byP[mesh_.byP_idx(i, j)], s.byP[mesh_.byP_idx(i, j + 1)], t1, t2);
        }
}

//------------------------------------------------------------------------------
// Averages, evaluation and limiting
//------------------------------------------------------------------------------
void CdgSolver::compute_averages(const SolverState& s) {
    for (int j = -1; j <= mesh_.ny; ++j)
        for (int i = -1; i <= mesh_.nx; ++i) {
            const int c = mesh_.pidx(i, j);
            const double* Rc = &s.C.R[(size_t)c * kNumR * Nb_];
            Vec8& a = avgC_[c];
            for (int r = 0; r < kNumR; ++r) a[R_TO_U[r]] = Rc[r * Nb_];
            a[UB1] = s.C.aux[c][0];
            a[UB2] = s.C.aux[c][1];
        }
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) {
            const int c = mesh_.didx(i, j);
            const double* Rc = &s.D.R[(size_t)c * kNumR * Nb_];
            Vec8& a = avgD_[c];
            for (int r = 0; r < kNumR; ++r) a[R_TO_U[r]] = Rc[r * Nb_];
            a[UB1] = s.D.aux[c][0];
            a[UB2] = s.D.aux[c][1];
        }
}

void CdgSolver::audit_averages(const char* where) const {
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            const Vec8& a = avgC_[mesh_.pidx(i, j)];
            if (!is_admissible(a))
                throw StructuralError(std::string(where) + ": primal composed average left the "
                                      "admissible set at cell (" + std::to_string(i) + "," +
                                      std::to_string(j) + "): rho=" + std::to_string(a[URHO]) +
                                      " rho_e=" + std::to_string(internal_energy(a)));
        }
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) {
            const Vec8& a = avgD_[mesh_.didx(i, j)];
            if (!is_admissible(a))
                throw StructuralError(std::string(where) + ": dual composed average left the "
                                      "admissible set at cell (" + std::to_string(i) + "," +
                                      std::to_string(j) + "): rho=" + std::to_string(a[URHO]) +
                                      " rho_e=" + std::to_string(internal_energy(a)));
        }
}

void CdgSolver::eval_cell(const MeshData& md, int cell, std::vector<double>& out) const {
    const double* Rc = &md.R[(size_t)cell * kNumR * Nb_];
    const DivFreeField& f = md.field[cell];
    for (int id = 0; id < layout_.M; ++id) {
        double* u = &out[(size_t)id * 8];
        const double* tab = &tabR_[(size_t)id * Nb_];
        for (int r = 0; r < kNumR; ++r) u[R_TO_U[r]] = dotn(Rc + r * Nb_, tab, Nb_);
        const double* tt = &tabT_[(size_t)id * n2_];
        u[UB1] = dotn(f.B1.data(), tt, n2_);
        u[UB2] = dotn(f.B2.data(), tt, n2_);
    }
}

void CdgSolver::limit_pass(const SolverState& s) {
    const int M = layout_.M;
    auto do_mesh = [&](bool primal) {
        const int ilo = primal ? -1 : 0;
        const int ihi = primal ? mesh_.nx : mesh_.nx;
        const int jlo = primal ? -1 : 0;
        const int jhi = primal ? mesh_.ny : mesh_.ny;
        for (int j = jlo; j <= jhi; ++j)
            for (int i = ilo; i <= ihi; ++i) {
                const int c = primal ? mesh_.pidx(i, j) : mesh_.didx(i, j);
                std::vector<double>& dst = primal ? limC_ : limD_;
                double* block = &dst[(size_t)c * M * 8];
                // evaluate own polynomials at all nodes
                const MeshData& md = primal ? s.C : s.D;
                const double* Rc = primal ? &workRC_[(size_t)c * kNumR * Nb_]
                                          : &workRD_[(size_t)c * kNumR * Nb_];
                const DivFreeField& f = md.field[c];
                for (int id = 0; id < M; ++id) {
                    double* u = block + (size_t)id * 8;
                    const double* tab = &tabR_[(size_t)id * Nb_];
                    for (int r = 0; r < kNumR; ++r) u[R_TO_U[r]] = dotn(Rc + r * Nb_, tab, Nb_);
                    const double* tt = &tabT_[(size_t)id * n2_];
                    u[UB1] = dotn(f.B1.data(), tt, n2_);
                    u[UB2] = dotn(f.B2.data(), tt, n2_);
                }
                double trho = 1.0, trhoe = 1.0;
                if (cfg_.limiter_enabled) {
                    const Vec8& a = primal ? avgC_[c] : avgD_[c];
                    detail::pp_limit_inplace(block, M, a, trho, trhoe);
                }
                (primal ? thrC_ : thrD_)[c] = trho;
                (primal ? threC_ : threD_)[c] = trhoe;
            }
    };
    do_mesh(true);
    do_mesh(false);

    // diagnostics: pointwise minima over the limited sets of real cells
    double mr = 1e300, me = 1e300;
    bool floors = true;
    double tr = 1.0, te = 1.0;
    auto scan = [&](bool primal, int i, int j) {
        const int c = primal ? mesh_.pidx(i, j) : mesh_.didx(i, j);
        const double* block = primal ? &limC_[(size_t)c * M * 8] : &limD_[(size_t)c * M * 8];
        const Vec8& a = primal ? avgC_[c] : avgD_[c];
        const double eps_r = std::min(kPpFloor, a[URHO]);
        const double eps_e = std::min(kPpFloor, internal_energy(a));
        for (int id = 0; id < M; ++id) {
            const double* u = block + (size_t)id * 8;
            const double m2 = u[UM1] * u[UM1] + u[UM2] * u[UM2] + u[UM3] * u[UM3];
            const double B2 = u[UB1] * u[UB1] + u[UB2] * u[UB2] + u[UB3] * u[UB3];
            const double ei = u[UE] - 0.5 * (m2 / u[URHO] + B2);
            mr = std::min(mr, u[URHO]);
            me = std::min(me, ei);
            if (cfg_.limiter_enabled &&
                (u[URHO] < eps_r * (1.0 - 1e-12) || ei < eps_e * (1.0 - 1e-12)))
                floors = false;
        }
        tr = std::min(tr, (primal ? thrC_ : thrD_)[c]);
        te = std::min(te, (primal ? threC_ : threD_)[c]);
    };
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) scan(true, i, j);
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) scan(false, i, j);
    acc_.min_rho = std::min(acc_.min_rho, mr);
    acc_.min_eint = std::min(acc_.min_eint, me);
    acc_.floors_ok = acc_.floors_ok && floors;
    acc_.theta_rho_min = std::min(acc_.theta_rho_min, tr);
    acc_.theta_rhoe_min = std::min(acc_.theta_rhoe_min, te);
}

const double* CdgSolver::lim(bool primal_mesh, int cell, int node) const {
    const std::vector<double>& src = primal_mesh ? limC_ : limD_;
    return &src[((size_t)cell * layout_.M + node) * 8];
}

//------------------------------------------------------------------------------
// COS pass
//------------------------------------------------------------------------------
void CdgSolver::cos_pass(SolverState& s, double dt) {
    if (!cfg_.cos_enabled) return;
    const int NT = 4 * N_ * N_;
    const double h = std::min(mesh_.dx, mesh_.dy);

    std::vector<double> wts(NT);
    for (int hx = 0; hx < 2; ++hx)
        for (int mx = 0; mx < N_; ++mx)
            for (int hy = 0; hy < 2; ++hy)
                for (int my = 0; my < N_; ++my)
                    wts[layout_.tensor_id(hx, mx, hy, my)] =
                        0.25 * layout_.gauss.weights[mx] * layout_.gauss.weights[my];

    auto indicator = [&](bool primal, int i, int j) {
        const int c = primal ? mesh_.pidx(i, j) : mesh_.didx(i, j);
        const Vec8& a = primal ? avgC_[c] : avgD_[c];
        const Mat8 H = entropy_hessian(a, gamma_);
        const int base = primal ? 0 : -1;
        const double* Rc = primal ? &workRC_[(size_t)c * kNumR * Nb_]
                                  : &workRD_[(size_t)c * kNumR * Nb_];
        const DivFreeField& fs = (primal ? s.C : s.D).field[c];
        double num = 0.0;
        for (int hx = 0; hx < 2; ++hx)
            for (int hy = 0; hy < 2; ++hy) {
                const int oc = primal ? mesh_.didx(i + base + hx, j + base + hy)
                                      : mesh_.pidx(i + base + hx, j + base + hy);
                const double* Ro = primal ? &workRD_[(size_t)oc * kNumR * Nb_]
                                          : &workRC_[(size_t)oc * kNumR * Nb_];
                const DivFreeField& fo = (primal ? s.D : s.C).field[oc];
                for (int mx = 0; mx < N_; ++mx)
                    for (int my = 0; my < N_; ++my) {
                        const int id = layout_.tensor_id(hx, mx, hy, my);
                        const int ida = layout_.tensor_id(1 - hx, mx, 1 - hy, my);
                        Vec8 d{};
                        const double* tab = &tabR_[(size_t)id * Nb_];
                        const double* taba = &tabR_[(size_t)ida * Nb_];
                        for (int r = 0; r < kNumR; ++r)
                            d[R_TO_U[r]] = dotn(Ro + r * Nb_, taba, Nb_) - dotn(Rc + r * Nb_, tab, Nb_);
                        const double* tt = &tabT_[(size_t)id * n2_];
                        const double* tta = &tabT_[(size_t)ida * n2_];
                        d[UB1] += dotn(fo.B1.data(), tta, n2_) - dotn(fs.B1.data(), tt, n2_);
                        d[UB2] += dotn(fo.B2.data(), tta, n2_) - dotn(fs.B2.data(), tt, n2_);
                        double q = 0.0;
                        for (int r = 0; r < 8; ++r) {
                            double hr = 0.0;
                            for (int cix = 0; cix < 8; ++cix) hr += H[r][cix] * d[cix];
                            q += d[r] * hr;
                        }
                        num += wts[id] * q;
                    }
            }
        double den = 1e-300;
        for (int r = 0; r < 8; ++r) {
            double hr = 0.0;
            for (int cix = 0; cix < 8; ++cix) hr += H[r][cix] * a[cix];
            den += a[r] * hr;
        }
        return std::max(num / den, 0.0);
    };

    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) psiC_[mesh_.pidx(i, j)] = indicator(true, i, j);
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) psiD_[mesh_.didx(i, j)] = indicator(false, i, j);

    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            const int c = mesh_.pidx(i, j);
            cos_damp(&workRC_[(size_t)c * kNumR * Nb_], Nb_, basis_.deg.data(), psiC_[c], dt, h,
                     cfg_.cos_c);
        }
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) {
            const int c = mesh_.didx(i, j);
            cos_damp(&workRD_[(size_t)c * kNumR * Nb_], Nb_, basis_.deg.data(), psiD_[c], dt, h,
                     cfg_.cos_c);
        }

    // refresh primal ghost copies of the damped coefficients
    const int nx = mesh_.nx, ny = mesh_.ny;
    const bool perx = prob_.bc_left.kind == BcKind::Periodic;
    const bool pery = prob_.bc_bottom.kind == BcKind::Periodic;
    for (int j = -1; j <= ny; ++j)
        for (int i = -1; i <= nx; ++i) {
            if (i >= 0 && i < nx && j >= 0 && j < ny) continue;
            int si = i, sj = j;
            bool inflow = false;
            const double cx = mesh_.x0 + (i + 0.5) * mesh_.dx;
            const double cy = mesh_.y0 + (j + 0.5) * mesh_.dy;
            if (i < 0 || i >= nx) {
                if (perx) si = (i + nx) % nx;
                else {
                    const BoundaryPolicy& bp = i < 0 ? prob_.bc_left : prob_.bc_right;
                    if (bp.kind == BcKind::Inflow ||
                        (bp.kind == BcKind::InflowSegment && cy >= bp.seg_lo && cy <= bp.seg_hi))
                        inflow = true;
                    si = std::clamp(i, 0, nx - 1);
                }
            }
            if (j < 0 || j >= ny) {
                if (pery) sj = (j + ny) % ny;
                else {
                    const BoundaryPolicy& bp = j < 0 ? prob_.bc_bottom : prob_.bc_top;
                    if (bp.kind == BcKind::Inflow ||
                        (bp.kind == BcKind::InflowSegment && cx >= bp.seg_lo && cx <= bp.seg_hi))
                        inflow = true;
                    sj = std::clamp(j, 0, ny - 1);
                }
            }
            if (inflow) continue; // constant data, damping-neutral
            std::memcpy(&workRC_[(size_t)mesh_.pidx(i, j) * kNumR * Nb_],
                        &workRC_[(size_t)mesh_.pidx(si, sj) * kNumR * Nb_],
                        sizeof(double) * kNumR * Nb_);
        }
}

//------------------------------------------------------------------------------
// Wave speeds from limited interface values
//------------------------------------------------------------------------------
std::array<double, 2> CdgSolver::measure_alpha() const {
    double a1 = 0.0, a2 = 0.0;
    auto pairs = [&](bool primal, int i, int j) {
        const int base = primal ? 0 : -1;
        const bool other = !primal;
        for (int hy = 0; hy < 2; ++hy)
            for (int nu = 0; nu < N_; ++nu) {
                const int idm = layout_.vline_id(1, 1 - hy, nu);
                const int cL = primal ? mesh_.didx(i + base, j + base + hy)
                                      : mesh_.pidx(i + base, j + base + hy);
                const int cR = primal ? mesh_.didx(i + base + 1, j + base + hy)
                                      : mesh_.pidx(i + base + 1, j + base + hy);
                Vec8 uL, uR;
                std::memcpy(uL.data(), lim(other, cL, idm), sizeof(Vec8));
                std::memcpy(uR.data(), lim(other, cR, idm), sizeof(Vec8));
                a1 = std::max(a1, max_wave_speed_pair(uR, uL, 1, gamma_));
            }
        for (int hx = 0; hx < 2; ++hx)
            for (int mu = 0; mu < N_; ++mu) {
                const int idm = layout_.hline_id(1 - hx, mu, 1);
                const int cB = primal ? mesh_.didx(i + base + hx, j + base)
                                      : mesh_.pidx(i + base + hx, j + base);
                const int cT = primal ? mesh_.didx(i + base + hx, j + base + 1)
                                      : mesh_.pidx(i + base + hx, j + base + 1);
                Vec8 uB, uT;
                std::memcpy(uB.data(), lim(other, cB, idm), sizeof(Vec8));
                std::memcpy(uT.data(), lim(other, cT, idm), sizeof(Vec8));
                a2 = std::max(a2, max_wave_speed_pair(uT, uB, 2, gamma_));
            }
    };
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) pairs(true, i, j);
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) pairs(false, i, j);
    return {a1, a2};
}

//------------------------------------------------------------------------------
// Edge evolution
//------------------------------------------------------------------------------
void CdgSolver::evolve_edges(const SolverState& in, SolverState& out, double dt,
                             double theta) const {
    const int nx = mesh_.nx, ny = mesh_.ny;
    const double* gw = layout_.gauss.weights.data();

    // vertical edges: d/dt b^x = -dG/dy weak form with endpoint fluxes
    auto evolve_vertical = [&](const EdgePoly& old, double len,
                               auto&& value_at, // (h, nu) -> limited state ptr
                               const double* uB, const double* uT) {
        EdgePoly e;
        e.N = N_;
        const double GB = gfun(uB), GT = gfun(uT);
        for (int m = 0; m < N_; ++m) {
            double blend = 0.0, grad = 0.0;
            for (int h = 0; h < 2; ++h)
                for (int nu = 0; nu < N_; ++nu) {
                    const double* u = value_at(h, nu);
                    const double w = 0.5 * gw[nu];
                    blend += w * u[UB1] * edgeP_[(h * N_ + nu) * N_ + m];
                    grad += w * gfun(u) * 2.0 * edgedP_[(h * N_ + nu) * N_ + m];
                }
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            e.c[m] = (2 * m + 1) * theta * blend + (1.0 - theta) * old.c[m] +
                     (2 * m + 1) * (dt / len) * (-GT + GB * sgn + grad);
        }
        return e;
    };
    auto evolve_horizontal = [&](const EdgePoly& old, double len, auto&& value_at,
                                 const double* uL, const double* uR) {
        EdgePoly e;
        e.N = N_;
        const double GL = gfun(uL), GR = gfun(uR);
        for (int m = 0; m < N_; ++m) {
            double blend = 0.0, grad = 0.0;
            for (int h = 0; h < 2; ++h)
                for (int mu = 0; mu < N_; ++mu) {
                    const double* u = value_at(h, mu);
                    const double w = 0.5 * gw[mu];
                    blend += w * u[UB2] * edgeP_[(h * N_ + mu) * N_ + m];
                    grad += w * gfun(u) * 2.0 * edgedP_[(h * N_ + mu) * N_ + m];
                }
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            e.c[m] = (2 * m + 1) * theta * blend + (1.0 - theta) * old.c[m] +
                     (2 * m + 1) * (dt / len) * (GR - GL * sgn - grad);
        }
        return e;
    };

    // primal edges evolve with dual-mesh data
    for (int s0 = 0; s0 <= nx; ++s0)
        for (int j = 0; j < ny; ++j) {
            const int idm1 = layout_.vert_id(1, 1);
            out.bxP[mesh_.bxP_idx(s0, j)] = evolve_vertical(
                in.bxP[mesh_.bxP_idx(s0, j)], mesh_.dy,
                [&](int h, int nu) { return lim(false, mesh_.didx(s0, j + h), layout_.vline_id(1, 1 - h, nu)); },
                lim(false, mesh_.didx(s0, j), idm1), lim(false, mesh_.didx(s0, j + 1), idm1));
        }
    for (int i = 0; i < nx; ++i)
        for (int t = 0; t <= ny; ++t) {
            const int idm1 = layout_.vert_id(1, 1);
            out.byP[mesh_.byP_idx(i, t)] = evolve_horizontal(
                in.byP[mesh_.byP_idx(i, t)], mesh_.dx,
                [&](int h, int mu) { return lim(false, mesh_.didx(i + h, t), layout_.hline_id(1 - h, mu, 1)); },
                lim(false, mesh_.didx(i, t), idm1), lim(false, mesh_.didx(i + 1, t), idm1));
        }
    // dual edges evolve with primal-mesh data
    for (int m = 0; m <= nx + 1; ++m)
        for (int r = 0; r <= ny; ++r) {
            const int idm1 = layout_.vert_id(1, 1);
            out.bxD[mesh_.bxD_idx(m, r)] = evolve_vertical(
                in.bxD[mesh_.bxD_idx(m, r)], mesh_.dy,
                [&](int h, int nu) { return lim(true, mesh_.pidx(m - 1, r - 1 + h), layout_.vline_id(1, 1 - h, nu)); },
                lim(true, mesh_.pidx(m - 1, r - 1), idm1), lim(true, mesh_.pidx(m - 1, r), idm1));
        }
    for (int i = 0; i <= nx; ++i)
        for (int t = 0; t <= ny + 1; ++t) {
            const int idm1 = layout_.vert_id(1, 1);
            out.byD[mesh_.byD_idx(i, t)] = evolve_horizontal(
                in.byD[mesh_.byD_idx(i, t)], mesh_.dx,
                [&](int h, int mu) { return lim(true, mesh_.pidx(i - 1 + h, t - 1), layout_.hline_id(1 - h, mu, 1)); },
                lim(true, mesh_.pidx(i - 1, t - 1), idm1), lim(true, mesh_.pidx(i, t - 1), idm1));
        }
}

//------------------------------------------------------------------------------
// Cell updates: R moments and auxiliary magnetic averages
//------------------------------------------------------------------------------
Vec8 CdgSolver::gather_tilde(bool primal, int i, int j) const {
    const int base = primal ? 0 : -1;
    const bool other = !primal;
    const int S = layout_.S;
    const double* gw = layout_.gauss.weights.data();
    Vec8 acc{};
    auto addv = [&](const double* u, double w) {
        for (int c = 0; c < 8; ++c) acc[c] += w * u[c];
    };
    auto ocell = [&](int ox, int oy) {
        return other ? mesh_.didx(i + base + ox, j + base + oy)
                     : mesh_.pidx(i + base + ox, j + base + oy);
    };
    // internal nodes per quadrant
    for (int qy = 0; qy < 2; ++qy)
        for (int qx = 0; qx < 2; ++qx) {
            const int oc = ocell(qx, qy);
            const int qopp = (1 - qy) * 2 + (1 - qx);
            for (int s = 0; s < S; ++s)
                addv(lim(other, oc, layout_.cadint_id(qopp, s)), 0.25 * cad_.internal[s].w);
        }
    // both traces on the interior mid-lines
    for (int hy = 0; hy < 2; ++hy)
        for (int nu = 0; nu < N_; ++nu) {
            const double w = 0.25 * gw[nu] * cad_.omega_x;
            addv(lim(other, ocell(0, hy), layout_.vline_id(2, 1 - hy, nu)), w);
            addv(lim(other, ocell(1, hy), layout_.vline_id(0, 1 - hy, nu)), w);
        }
    for (int hx = 0; hx < 2; ++hx)
        for (int mu = 0; mu < N_; ++mu) {
            const double w = 0.25 * gw[mu] * cad_.omega_y;
            addv(lim(other, ocell(hx, 0), layout_.hline_id(1 - hx, mu, 2)), w);
            addv(lim(other, ocell(hx, 1), layout_.hline_id(1 - hx, mu, 0)), w);
        }
    // single-valued nodes on the cell's own boundary
    for (int hy = 0; hy < 2; ++hy)
        for (int nu = 0; nu < N_; ++nu) {
            const double w = 0.25 * gw[nu] * cad_.omega_x;
            addv(lim(other, ocell(0, hy), layout_.vline_id(1, 1 - hy, nu)), w);
            addv(lim(other, ocell(1, hy), layout_.vline_id(1, 1 - hy, nu)), w);
        }
    for (int hx = 0; hx < 2; ++hx)
        for (int mu = 0; mu < N_; ++mu) {
            const double w = 0.25 * gw[mu] * cad_.omega_y;
            addv(lim(other, ocell(hx, 0), layout_.hline_id(1 - hx, mu, 1)), w);
            addv(lim(other, ocell(hx, 1), layout_.hline_id(1 - hx, mu, 1)), w);
        }
    return acc;
}

void CdgSolver::update_R(const SolverState& in, SolverState& out, double dt, double theta) {
    const double* gw = layout_.gauss.weights.data();
    const double dx = mesh_.dx, dy = mesh_.dy;
    double cancel_max = 0.0;

    auto do_cell = [&](bool primal, int i, int j) {
        const int base = primal ? 0 : -1;
        const bool other = !primal;
        const int c = primal ? mesh_.pidx(i, j) : mesh_.didx(i, j);
        const double* myR = primal ? &workRC_[(size_t)c * kNumR * Nb_]
                                   : &workRD_[(size_t)c * kNumR * Nb_];
        const std::vector<double>& workOther = primal ? workRD_ : workRC_;
        auto ocell = [&](int ox, int oy) {
            return other ? mesh_.didx(i + base + ox, j + base + oy)
                         : mesh_.pidx(i + base + ox, j + base + oy);
        };

        double dmom[kMaxNb][kNumR] = {};  // dissipation moments (l >= 1)
        double vmom[kMaxNb][kNumR] = {};  // volume flux moments
        double smom[kMaxNb][kNumR] = {};  // surface flux moments

        // volume nodes: limited fluxes, raw polynomials for the dissipation
        double f1[8], f2[8];
        for (int hx = 0; hx < 2; ++hx)
            for (int hy = 0; hy < 2; ++hy) {
                const int oc = ocell(hx, hy);
                const double* Ro = &workOther[(size_t)oc * kNumR * Nb_];
                for (int mx = 0; mx < N_; ++mx)
                    for (int my = 0; my < N_; ++my) {
                        const int id = layout_.tensor_id(hx, mx, hy, my);
                        const int ida = layout_.tensor_id(1 - hx, mx, 1 - hy, my);
                        const double w = 0.25 * gw[mx] * gw[my];
                        const double* tab = &tabR_[(size_t)id * Nb_];
                        const double* taba = &tabR_[(size_t)ida * Nb_];
                        double dR[kNumR];
                        for (int r = 0; r < kNumR; ++r)
                            dR[r] = dotn(Ro + r * Nb_, taba, Nb_) - dotn(myR + r * Nb_, tab, Nb_);
                        flux_both(lim(other, oc, ida), gamma_, f1, f2);
                        for (int l = 1; l < Nb_; ++l) {
                            const double phi = tab[l];
                            const double gx = dgx_[(size_t)id * Nb_ + l] / dx;
                            const double gy = dgy_[(size_t)id * Nb_ + l] / dy;
                            for (int r = 0; r < kNumR; ++r) {
                                dmom[l][r] += w * dR[r] * phi;
                                vmom[l][r] += w * (f1[R_TO_U[r]] * gx + f2[R_TO_U[r]] * gy);
                            }
                        }
                        // l = 0 volume term vanishes (constant test function)
                    }
            }

        // surface terms and edge-mean electric fields / magnetic traces
        double GL = 0.0, GR = 0.0, GB = 0.0, GT = 0.0;
        double c1 = 0.0, c2 = 0.0; // discrete divergence cancellation sum
        for (int hy = 0; hy < 2; ++hy)
            for (int nu = 0; nu < N_; ++nu) {
                const double w = 0.5 * gw[nu];
                const int idm = layout_.vline_id(1, 1 - hy, nu);
                const double* uL = lim(other, ocell(0, hy), idm);
                const double* uR = lim(other, ocell(1, hy), idm);
                flux_both(uL, gamma_, f1, f2);
                for (int l = 0; l < Nb_; ++l) {
                    const double phi = tabR_[(size_t)layout_.vline_id(0, hy, nu) * Nb_ + l];
                    for (int r = 0; r < kNumR; ++r) smom[l][r] -= w / dx * f1[R_TO_U[r]] * phi;
                }
                flux_both(uR, gamma_, f1, f2);
                for (int l = 0; l < Nb_; ++l) {
                    const double phi = tabR_[(size_t)layout_.vline_id(2, hy, nu) * Nb_ + l];
                    for (int r = 0; r < kNumR; ++r) smom[l][r] += w / dx * f1[R_TO_U[r]] * phi;
                }
                GL += w * gfun(uL);
                GR += w * gfun(uR);
                c1 += w * (uR[UB1] - uL[UB1]) / dx;
            }
        for (int hx = 0; hx < 2; ++hx)
            for (int mu = 0; mu < N_; ++mu) {
                const double w = 0.5 * gw[mu];
                const int idm = layout_.hline_id(1 - hx, mu, 1);
                const double* uB = lim(other, ocell(hx, 0), idm);
                const double* uT = lim(other, ocell(hx, 1), idm);
                flux_both(uB, gamma_, f1, f2);
                for (int l = 0; l < Nb_; ++l) {
                    const double phi = tabR_[(size_t)layout_.hline_id(hx, mu, 0) * Nb_ + l];
                    for (int r = 0; r < kNumR; ++r) smom[l][r] -= w / dy * f2[R_TO_U[r]] * phi;
                }
                flux_both(uT, gamma_, f1, f2);
                for (int l = 0; l < Nb_; ++l) {
                    const double phi = tabR_[(size_t)layout_.hline_id(hx, mu, 2) * Nb_ + l];
                    for (int r = 0; r < kNumR; ++r) smom[l][r] += w / dy * f2[R_TO_U[r]] * phi;
                }
                GB += w * gfun(uB);
                GT += w * gfun(uT);
                c2 += w * (uT[UB2] - uB[UB2]) / dy;
            }

        const Vec8 tilde = gather_tilde(primal, i, j);

        MeshData& md = primal ? out.C : out.D;
        double* Rn = &md.R[(size_t)c * kNumR * Nb_];
        const Vec8& avg = primal ? avgC_[c] : avgD_[c];
        for (int r = 0; r < kNumR; ++r) {
            Rn[r * Nb_] = myR[r * Nb_] + theta * (tilde[R_TO_U[r]] - avg[R_TO_U[r]]) -
                          dt * smom[0][r];
            for (int l = 1; l < Nb_; ++l)
                Rn[r * Nb_ + l] = myR[r * Nb_ + l] +
                                  basis_.inv_mass[l] *
                                      (theta * dmom[l][r] + dt * (vmom[l][r] - smom[l][r]));
        }

        auto& aux = md.aux[c];
        const auto& aux_old = (primal ? in.C : in.D).aux[c];
        aux[0] = aux_old[0] + theta * (tilde[UB1] - aux_old[0]) - dt / dy * (GT - GB);
        aux[1] = aux_old[1] + theta * (tilde[UB2] - aux_old[1]) + dt / dx * (GR - GL);

        cancel_max = std::max(cancel_max, std::abs(c1 + c2));
    };

    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) do_cell(true, i, j);
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) do_cell(false, i, j);
    acc_.max_cancel = std::max(acc_.max_cancel, cancel_max);
}

void CdgSolver::update_aux(const SolverState&, SolverState&, double, double) const {
    // auxiliary averages are updated together with the R moments in update_R
}

namespace {
// Y := a X + b Y over the full payload (moments, potentials, fields,
// auxiliary averages, edge polynomials).
void axpby_state(double a, const SolverState& X, double b, SolverState& Y) {
    auto mix = [a, b](const std::vector<double>& x, std::vector<double>& y) {
        for (size_t i = 0; i < y.size(); ++i) y[i] = a * x[i] + b * y[i];
    };
    mix(X.C.R, Y.C.R);
    mix(X.D.R, Y.D.R);
    for (size_t c = 0; c < Y.C.aux.size(); ++c)
        for (int d = 0; d < 2; ++d) Y.C.aux[c][d] = a * X.C.aux[c][d] + b * Y.C.aux[c][d];
    for (size_t c = 0; c < Y.D.aux.size(); ++c)
        for (int d = 0; d < 2; ++d) Y.D.aux[c][d] = a * X.D.aux[c][d] + b * Y.D.aux[c][d];
    auto mixf = [a, b](const std::vector<DivFreeField>& x, std::vector<DivFreeField>& y) {
        for (size_t c = 0; c < y.size(); ++c)
            for (int i = 0; i < kMaxPotCoef; ++i) {
                y[c].A[i] = a * x[c].A[i] + b * y[c].A[i];
                y[c].B1[i] = a * x[c].B1[i] + b * y[c].B1[i];
                y[c].B2[i] = a * x[c].B2[i] + b * y[c].B2[i];
            }
    };
    mixf(X.C.field, Y.C.field);
    mixf(X.D.field, Y.D.field);
    auto mixe = [a, b](const std::vector<EdgePoly>& x, std::vector<EdgePoly>& y) {
        for (size_t e = 0; e < y.size(); ++e)
            for (int m = 0; m < kMaxEdgeCoef; ++m) y[e].c[m] = a * x[e].c[m] + b * y[e].c[m];
    };
    mixe(X.bxP, Y.bxP);
    mixe(X.byP, Y.byP);
    mixe(X.bxD, Y.bxD);
    mixe(X.byD, Y.byD);
}
} // namespace

//------------------------------------------------------------------------------
// Field reconstruction from the evolved edges
//------------------------------------------------------------------------------
void CdgSolver::reconstruct_fields(const SolverState& in, SolverState& out, double theta) const {
    const int T = 4 * N_ * N_;
    auto blend_targets = [&](bool primal, int i, int j, std::vector<double>& t1,
                             std::vector<double>& t2) {
        const int base = primal ? 0 : -1;
        const int c = primal ? mesh_.pidx(i, j) : mesh_.didx(i, j);
        const DivFreeField& fs = (primal ? in.C : in.D).field[c];
        for (int hx = 0; hx < 2; ++hx)
            for (int hy = 0; hy < 2; ++hy) {
                const int oc = primal ? mesh_.didx(i + base + hx, j + base + hy)
                                      : mesh_.pidx(i + base + hx, j + base + hy);
                const DivFreeField& fo = (primal ? in.D : in.C).field[oc];
                for (int mx = 0; mx < N_; ++mx)
                    for (int my = 0; my < N_; ++my) {
                        const int id = layout_.tensor_id(hx, mx, hy, my);
                        const int ida = layout_.tensor_id(1 - hx, mx, 1 - hy, my);
                        const double* tt = &tabT_[(size_t)id * n2_];
                        const double* tta = &tabT_[(size_t)ida * n2_];
                        t1[id] = theta * dotn(fo.B1.data(), tta, n2_) +
                                 (1.0 - theta) * dotn(fs.B1.data(), tt, n2_);
                        t2[id] = theta * dotn(fo.B2.data(), tta, n2_) +
                                 (1.0 - theta) * dotn(fs.B2.data(), tt, n2_);
                    }
            }
    };
    std::vector<double> t1(T), t2(T);
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            blend_targets(true, i, j, t1, t2);
            out.C.field[mesh_.pidx(i, j)] = recon_.reconstruct(
                out.bxP[mesh_.bxP_idx(i, j)], out.bxP[mesh_.bxP_idx(i + 1, j)],
                out.byP[mesh_.byP_idx(i, j)], out.byP[mesh_.byP_idx(i, j + 1)], t1, t2);
        }
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) {
            blend_targets(false, i, j, t1, t2);
            out.D.field[mesh_.didx(i, j)] = recon_.reconstruct(
                out.bxD[mesh_.bxD_idx(i, j)], out.bxD[mesh_.bxD_idx(i + 1, j)],
                out.byD[mesh_.byD_idx(i, j)], out.byD[mesh_.byD_idx(i, j + 1)], t1, t2);
        }
}

//------------------------------------------------------------------------------
// Audits
//------------------------------------------------------------------------------
void CdgSolver::divergence_audit(const SolverState& s, const char* where) {
    double max_div = 0.0, max_jump = 0.0, max_loop = 0.0, bscale = 1.0;
    const TensorBasis tb(n_ - 1);
    std::array<double, kMaxPotCoef> d1{}, d2{}, dv{};

    auto cell_div = [&](const DivFreeField& f) {
        tb.dxi_coeffs(f.B1.data(), d1.data());
        tb.deta_coeffs(f.B2.data(), d2.data());
        for (int i = 0; i < n2_; ++i) dv[i] = d1[i] / mesh_.dx + d2[i] / mesh_.dy;
        double m = 0.0;
        for (int id = 0; id < layout_.M; ++id)
            m = std::max(m, std::abs(dotn(dv.data(), &tabT_[(size_t)id * n2_], n2_)));
        return m;
    };
    auto field_scale = [&](const DivFreeField& f) {
        double m = 0.0;
        for (int i = 0; i < n2_; ++i) m = std::max({m, std::abs(f.B1[i]), std::abs(f.B2[i])});
        return m;
    };

    auto loop_cell = [&](const EdgePoly& L, const EdgePoly& R, const EdgePoly& B,
                         const EdgePoly& T) {
        max_loop = std::max(max_loop, std::abs(compatibility_residual(L, R, B, T, mesh_.dx, mesh_.dy)));
    };

    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            const DivFreeField& f = s.C.field[mesh_.pidx(i, j)];
            max_div = std::max(max_div, cell_div(f));
            bscale = std::max(bscale, field_scale(f));
            loop_cell(s.bxP[mesh_.bxP_idx(i, j)], s.bxP[mesh_.bxP_idx(i + 1, j)],
                      s.byP[mesh_.byP_idx(i, j)], s.byP[mesh_.byP_idx(i, j + 1)]);
        }
    for (int j = 0; j <= mesh_.ny; ++j)
        for (int i = 0; i <= mesh_.nx; ++i) {
            const DivFreeField& f = s.D.field[mesh_.didx(i, j)];
            max_div = std::max(max_div, cell_div(f));
            bscale = std::max(bscale, field_scale(f));
            loop_cell(s.bxD[mesh_.bxD_idx(i, j)], s.bxD[mesh_.bxD_idx(i + 1, j)],
                      s.byD[mesh_.byD_idx(i, j)], s.byD[mesh_.byD_idx(i, j + 1)]);
        }

    // normal-trace jumps against the shared edge polynomials
    auto trace_jump_v = [&](const DivFreeField& f, int station, const EdgePoly& e) {
        for (int h = 0; h < 2; ++h)
            for (int nu = 0; nu < N_; ++nu) {
                const double sig = layout_.hnode(h, nu);
                const double tr = f.eval_B1(PointLayout::station(station), sig);
                max_jump = std::max(max_jump, std::abs(tr - e.eval(sig)));
            }
    };
    auto trace_jump_h = [&](const DivFreeField& f, int station, const EdgePoly& e) {
        for (int h = 0; h < 2; ++h)
            for (int mu = 0; mu < N_; ++mu) {
                const double sig = layout_.hnode(h, mu);
                const double tr = f.eval_B2(sig, PointLayout::station(station));
                max_jump = std::max(max_jump, std::abs(tr - e.eval(sig)));
            }
    };
    for (int s0 = 0; s0 <= mesh_.nx; ++s0)
        for (int j = 0; j < mesh_.ny; ++j) {
            const EdgePoly& e = s.bxP[mesh_.bxP_idx(s0, j)];
            if (s0 > 0) trace_jump_v(s.C.field[mesh_.pidx(s0 - 1, j)], 2, e);
            if (s0 < mesh_.nx) trace_jump_v(s.C.field[mesh_.pidx(s0, j)], 0, e);
        }
    for (int i = 0; i < mesh_.nx; ++i)
        for (int t = 0; t <= mesh_.ny; ++t) {
            const EdgePoly& e = s.byP[mesh_.byP_idx(i, t)];
            if (t > 0) trace_jump_h(s.C.field[mesh_.pidx(i, t - 1)], 2, e);
            if (t < mesh_.ny) trace_jump_h(s.C.field[mesh_.pidx(i, t)], 0, e);
        }
    for (int m = 0; m <= mesh_.nx + 1; ++m)
        for (int r = 0; r <= mesh_.ny; ++r) {
            const EdgePoly& e = s.bxD[mesh_.bxD_idx(m, r)];
            if (m > 0) trace_jump_v(s.D.field[mesh_.didx(m - 1, r)], 2, e);
            if (m <= mesh_.nx) trace_jump_v(s.D.field[mesh_.didx(m, r)], 0, e);
        }
    for (int i = 0; i <= mesh_.nx; ++i)
        for (int t = 0; t <= mesh_.ny + 1; ++t) {
            const EdgePoly& e = s.byD[mesh_.byD_idx(i, t)];
            if (t > 0) trace_jump_h(s.D.field[mesh_.didx(i, t - 1)], 2, e);
            if (t <= mesh_.ny) trace_jump_h(s.D.field[mesh_.didx(i, t)], 0, e);
        }

    acc_.max_divb = std::max(acc_.max_divb, max_div);
    acc_.max_jump = std::max(acc_.max_jump, max_jump);
    acc_.max_loop = std::max(acc_.max_loop, max_loop);
    const double tol = 1e-12 * bscale;
    if (max_div > tol || max_jump > tol || max_loop > tol * (mesh_.dx + mesh_.dy))
        throw StructuralError(std::string(where) +
                              ": divergence audit failed: max|div|=" + std::to_string(max_div) +
                              " max_jump=" + std::to_string(max_jump) +
                              " max_loop=" + std::to_string(max_loop) +
                              " (scale " + std::to_string(bscale) + ")");
}

//------------------------------------------------------------------------------
// Stage, step, sampling
//------------------------------------------------------------------------------
void CdgSolver::euler_stage(SolverState& in, SolverState& out, double dt, double theta) {
    fill_ghosts(in);
    compute_averages(in);
    audit_averages("stage entry");

    workRC_ = in.C.R;
    workRD_ = in.D.R;
    cos_pass(in, dt);
    limit_pass(in);

    out = in;
    evolve_edges(in, out, dt, theta);
    update_R(in, out, dt, theta);
    reconstruct_fields(in, out, theta);
    out.t = in.t + dt;
}

StepDiagnostics CdgSolver::ssp_rk3_step(const TimeStepInfo& info) {
    acc_ = StepDiagnostics{};
    acc_.min_rho = acc_.min_eint = 1e300;
    acc_.floors_ok = true;
    acc_.theta_rho_min = acc_.theta_rhoe_min = 1.0;

    const double dt = info.dt, th = info.theta;
    const bool audit_now = cfg_.audit_every > 0 && (state_.step % cfg_.audit_every == 0);

    auto post_stage = [&](SolverState& s, const char* where) {
        compute_averages(s);
        audit_averages(where);
        if (audit_now) divergence_audit(s, where);
    };

    const double t0 = state_.t;
    const long step0 = state_.step;

    euler_stage(state_, s1_, dt, th);
    post_stage(s1_, "stage 1");
    euler_stage(s1_, s2_, dt, th);
    axpby_state(0.75, state_, 0.25, s2_);
    s2_.t = t0 + 0.5 * dt;
    post_stage(s2_, "stage 2");
    euler_stage(s2_, s3_, dt, th);
    axpby_state(1.0 / 3.0, state_, 2.0 / 3.0, s3_);
    s3_.t = t0 + dt;
    s3_.step = step0 + 1;
    post_stage(s3_, "stage 3");

    std::swap(state_, s3_);

    const auto tot = current_totals();
    acc_.step = state_.step;
    acc_.t = state_.t;
    acc_.dt = dt;
    acc_.theta = th;
    acc_.alpha1 = info.alpha1;
    acc_.alpha2 = info.alpha2;
    auto drift = [&](int c) {
        const double denom = std::max(std::abs(totals0_[c]), 1e-300);
        return (tot[c] - totals0_[c]) / denom;
    };
    acc_.mass_drift = drift(0);
    acc_.mom1_drift = drift(1);
    acc_.mom2_drift = drift(2);
    acc_.energy_drift = drift(3);
    diag_ = acc_;
    return diag_;
}

Vec8 CdgSolver::sample_primal(int i, int j) const {
    const int c = mesh_.pidx(i, j);
    const double* Rc = &state_.C.R[(size_t)c * kNumR * Nb_];
    Vec8 u{};
    for (int r = 0; r < kNumR; ++r) {
        double v = 0.0;
        for (int l = 0; l < Nb_; ++l) v += Rc[r * Nb_ + l] * basis_.eval(l, 0.0, 0.0);
        u[R_TO_U[r]] = v;
    }
    const DivFreeField& f = state_.C.field[c];
    u[UB1] = f.eval_B1(0.0, 0.0);
    u[UB2] = f.eval_B2(0.0, 0.0);
    return u;
}

Vec8 CdgSolver::composed_average_primal(int i, int j) const {
    const int c = mesh_.pidx(i, j);
    const double* Rc = &state_.C.R[(size_t)c * kNumR * Nb_];
    Vec8 a{};
    for (int r = 0; r < kNumR; ++r) a[R_TO_U[r]] = Rc[r * Nb_];
    a[UB1] = state_.C.aux[c][0];
    a[UB2] = state_.C.aux[c][1];
    return a;
}

Vec8 CdgSolver::tilde_average_primal(int i, int j) {
    fill_ghosts(state_);
    compute_averages(state_);
    workRC_ = state_.C.R;
    workRD_ = state_.D.R;
    limit_pass(state_);
    return gather_tilde(true, i, j);
}

std::array<double, 4> CdgSolver::current_totals() const {
    std::array<double, 4> t{};
    const double area = mesh_.dx * mesh_.dy;
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            const int c = mesh_.pidx(i, j);
            const double* Rc = &state_.C.R[(size_t)c * kNumR * Nb_];
            t[0] += 0.5 * area * Rc[0 * Nb_];
            t[1] += 0.5 * area * Rc[1 * Nb_];
            t[2] += 0.5 * area * Rc[2 * Nb_];
            t[3] += 0.5 * area * Rc[5 * Nb_];
        }
    for (int j = 0; j < mesh_.ny; ++j)
        for (int i = 0; i < mesh_.nx; ++i) {
            const int c = mesh_.didx(i, j);
            const double* Rc = &state_.D.R[(size_t)c * kNumR * Nb_];
            t[0] += 0.5 * area * Rc[0 * Nb_];
            t[1] += 0.5 * area * Rc[1 * Nb_];
            t[2] += 0.5 * area * Rc[2 * Nb_];
            t[3] += 0.5 * area * Rc[5 * Nb_];
        }
    return t;
}

TimeStepInfo CdgSolver::compute_dt(double t_remaining) {
    fill_ghosts(state_);
    compute_averages(state_);
    audit_averages("compute_dt");
    workRC_ = state_.C.R;
    workRD_ = state_.D.R;
    limit_pass(state_);
    const auto a = measure_alpha();
    const double a1 = cfg_.alpha_headroom * a[0];
    const double a2 = cfg_.alpha_headroom * a[1];
    rebuild_layout(std::max(a1, 1e-300) / mesh_.dx, std::max(a2, 1e-300) / mesh_.dy);
    return compute_dt_info(a1, a2, mesh_.dx, mesh_.dy, t_remaining, cfg_);
}

} // namespace posdiv
