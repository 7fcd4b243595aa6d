//==============================================================================
// Overlapping primal/dual Cartesian meshes and the per-cell point layout.
//
// Primal cell (i,j) covers [x0+i dx, x0+(i+1) dx] x [y0+j dy, y0+(j+1) dy]
// for i in [0,nx), j in [0,ny), with one ring of ghost cells on each side.
// Dual cells are staggered by half a spacing: dual (i,j) is centered on the
// primal corner (x0+i dx, y0+j dy) for i in [0..nx], j in [0..ny]; the
// boundary ring of dual cells extends half a cell outside the domain and is
// evolved like any other dual cell, reading primal ghost data.
//
// Every cell of either mesh carries the same reference point layout:
//   tensor   2N x 2N half-interval Gauss nodes (N per half, N = k+1)
//   vline    three x-stations {left, mid, right} x 2N y-nodes
//   hline    2N x-nodes x three y-stations
//   vertex   3 x 3 grid of corners, edge midpoints and the center
//   cadint   S internal decomposition nodes per quadrant
// Overlap geometry makes these layouts alias across meshes: a cell's tensor
// nodes are tensor nodes of the four overlapping cells of the other mesh,
// its mid-station nodes are boundary-station nodes of the other mesh, and a
// quadrant's internal nodes are shared by exactly one cell of each mesh.
//==============================================================================
#pragma once

#include <cmath>
#include <vector>

#include "posdiv/basis.hpp"
#include "posdiv/cad.hpp"
#include "posdiv/errors.hpp"
#include "posdiv/quadrature.hpp"

namespace posdiv {

struct MeshPair {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;

    // ---- primal cells, one ghost ring ----
    int pstride() const { return nx + 2; }
    int pcount() const { return (nx + 2) * (ny + 2); }
    int pidx(int i, int j) const { return (i + 1) + pstride() * (j + 1); }
    CellRect primal_rect(int i, int j) const {
        return {x0 + (i + 0.5) * dx, y0 + (j + 0.5) * dy, dx, dy};
    }

    // ---- dual cells, includes the boundary ring, no ghosts ----
    int dstride() const { return nx + 1; }
    int dcount() const { return (nx + 1) * (ny + 1); }
    int didx(int i, int j) const { return i + dstride() * j; }
    CellRect dual_rect(int i, int j) const { return {x0 + i * dx, y0 + j * dy, dx, dy}; }

    // ---- primal edges (normal magnetic component storage) ----
    // vertical: station s in [-1..nx+1], row j in [-1..ny]
    int bxP_count() const { return (nx + 3) * (ny + 2); }
    int bxP_idx(int s, int j) const { return (s + 1) + (nx + 3) * (j + 1); }
    // horizontal: column i in [-1..nx], station t in [-1..ny+1]
    int byP_count() const { return (nx + 2) * (ny + 3); }
    int byP_idx(int i, int t) const { return (i + 1) + (nx + 2) * (t + 1); }

    // ---- dual edges ----
    // vertical: station m in [0..nx+1] at x = x0+(m-1/2)dx, row r in [0..ny]
    int bxD_count() const { return (nx + 2) * (ny + 1); }
    int bxD_idx(int m, int r) const { return m + (nx + 2) * r; }
    // horizontal: column i in [0..nx], station t in [0..ny+1] at y = y0+(t-1/2)dy
    int byD_count() const { return (nx + 1) * (ny + 2); }
    int byD_idx(int i, int t) const { return i + (nx + 1) * t; }
};

inline MeshPair build_mesh_pair(double xmin, double xmax, double ymin, double ymax,
                                int nx, int ny) {
    if (nx < 2 || ny < 2) throw ConfigError("build_mesh_pair: need nx, ny >= 2");
    if (!(xmax > xmin) || !(ymax > ymin)) throw ConfigError("build_mesh_pair: degenerate domain");
    MeshPair m;
    m.x0 = xmin; m.y0 = ymin; m.x1 = xmax; m.y1 = ymax;
    m.nx = nx; m.ny = ny;
    m.dx = (xmax - xmin) / nx;
    m.dy = (ymax - ymin) / ny;
    return m;
}

//------------------------------------------------------------------------------
// Reference point layout shared by every cell of both meshes.
struct PointLayout {
    int k = 2;
    int N = 3; // Gauss nodes per half-interval
    int S = 0; // internal decomposition nodes per quadrant
    Quadrature1D gauss; // N-point rule on [-1/2,1/2]
    std::vector<double> xi, eta; // reference coordinates of all M nodes

    int off_tensor = 0, off_vline = 0, off_hline = 0, off_vert = 0, off_cadint = 0;
    int M = 0;

    // half-interval node position: half h in {0,1}, node mu
    double hnode(int h, int mu) const { return (h ? 0.25 : -0.25) + 0.5 * gauss.nodes[mu]; }
    static double station(int s) { return 0.5 * (s - 1); } // {-1/2, 0, 1/2}

    int tensor_id(int hx, int mx, int hy, int my) const {
        return off_tensor + (hx * N + mx) * (2 * N) + (hy * N + my);
    }
    int vline_id(int s, int hy, int my) const { return off_vline + s * (2 * N) + hy * N + my; }
    int hline_id(int hx, int mx, int s) const { return off_hline + (hx * N + mx) * 3 + s; }
    int vert_id(int sx, int sy) const { return off_vert + sx * 3 + sy; }
    int cadint_id(int q, int s) const { return off_cadint + q * S + s; } // q = qy*2+qx

    PointLayout() = default;
    PointLayout(int k_, const CadLayout& cad) : k(k_), N(k_ + 1), S((int)cad.internal.size()) {
        gauss = gauss_nodes(N);
        off_tensor = 0;
        off_vline = off_tensor + 4 * N * N;
        off_hline = off_vline + 6 * N;
        off_vert = off_hline + 6 * N;
        off_cadint = off_vert + 9;
        M = off_cadint + 4 * S;
        xi.resize(M);
        eta.resize(M);
        for (int hx = 0; hx < 2; ++hx)
            for (int mx = 0; mx < N; ++mx)
                for (int hy = 0; hy < 2; ++hy)
                    for (int my = 0; my < N; ++my) {
                        const int id = tensor_id(hx, mx, hy, my);
                        xi[id] = hnode(hx, mx);
                        eta[id] = hnode(hy, my);
                    }
        for (int s = 0; s < 3; ++s)
            for (int hy = 0; hy < 2; ++hy)
                for (int my = 0; my < N; ++my) {
                    const int id = vline_id(s, hy, my);
                    xi[id] = station(s);
                    eta[id] = hnode(hy, my);
                }
        for (int hx = 0; hx < 2; ++hx)
            for (int mx = 0; mx < N; ++mx)
                for (int s = 0; s < 3; ++s) {
                    const int id = hline_id(hx, mx, s);
                    xi[id] = hnode(hx, mx);
                    eta[id] = station(s);
                }
        for (int sx = 0; sx < 3; ++sx)
            for (int sy = 0; sy < 3; ++sy) {
                const int id = vert_id(sx, sy);
                xi[id] = station(sx);
                eta[id] = station(sy);
            }
        for (int q = 0; q < 4; ++q) {
            const double qcx = (q & 1) ? 0.25 : -0.25;
            const double qcy = (q & 2) ? 0.25 : -0.25;
            for (int s = 0; s < S; ++s) {
                const int id = cadint_id(q, s);
                xi[id] = qcx + 0.5 * cad.internal[s].x;
                eta[id] = qcy + 0.5 * cad.internal[s].y;
            }
        }
    }
};

//------------------------------------------------------------------------------
// Materialized per-cell point sets (global coordinates), for verification.
struct PointSets {
    PointLayout layout;
    MeshPair mesh;

    std::vector<std::pair<double, double>> primal_points(int i, int j) const {
        return points(mesh.primal_rect(i, j));
    }
    // Union-restriction: the points of the four overlapping primal cells that
    // fall inside the dual cell; by the aliasing noted above this equals the
    // dual cell's own layout.
    std::vector<std::pair<double, double>> dual_points(int i, int j) const {
        return points(mesh.dual_rect(i, j));
    }
    // The four cell corners.
    std::vector<std::pair<double, double>> corner_points(const CellRect& r) const {
        return {{r.xc - 0.5 * r.dx, r.yc - 0.5 * r.dy},
                {r.xc + 0.5 * r.dx, r.yc - 0.5 * r.dy},
                {r.xc - 0.5 * r.dx, r.yc + 0.5 * r.dy},
                {r.xc + 0.5 * r.dx, r.yc + 0.5 * r.dy}};
    }

  private:
    std::vector<std::pair<double, double>> points(const CellRect& r) const {
        std::vector<std::pair<double, double>> out(layout.M);
        for (int id = 0; id < layout.M; ++id)
            out[id] = {r.xc + layout.xi[id] * r.dx, r.yc + layout.eta[id] * r.dy};
        return out;
    }
};

inline PointSets assemble_point_sets(const MeshPair& mesh, int k, const CadLayout& cad) {
    if (cad.k != k) throw ConfigError("assemble_point_sets: k mismatch with decomposition");
    PointSets ps;
    ps.layout = PointLayout(k, cad);
    ps.mesh = mesh;
    return ps;
}

} // namespace posdiv
