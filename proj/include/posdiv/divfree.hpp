//==============================================================================
// Exactly divergence-free in-cell magnetic fields.
//
// Each cell carries a scalar potential A in the tensor space of degree k+1
// per direction, with (B1, B2) = (dA/dy, -dA/dx).  Boundary values of A are
// obtained by integrating the shared edge-normal polynomials along the cell
// boundary (single-valued by loop closure), which makes the normal trace
// match the edge data exactly; the remaining interior coefficients are fixed
// by a least-squares fit of (B1, B2) to a target field at the tensor nodes.
// Divergence-freeness is structural: div B = d2A/dxdy - d2A/dydx.
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "posdiv/basis.hpp"
#include "posdiv/edge_field.hpp"
#include "posdiv/errors.hpp"

namespace posdiv {

inline constexpr int kMaxPotCoef = 25; // (k+2)^2 for k <= 3

struct DivFreeField {
    int k = 2;
    int n = 4; // k+2 modes per direction
    std::array<double, kMaxPotCoef> A{};
    std::array<double, kMaxPotCoef> B1{}; // physical-units modal coefficients
    std::array<double, kMaxPotCoef> B2{};

    double eval_B1(double xi, double eta) const { return TensorBasis(n - 1).eval(B1.data(), xi, eta); }
    double eval_B2(double xi, double eta) const { return TensorBasis(n - 1).eval(B2.data(), xi, eta); }
};

namespace detail {

// Cholesky solve for the small SPD normal systems (ndof <= 9).
template <int MAXN>
struct SmallCholesky {
    int n = 0;
    std::array<double, MAXN * MAXN> L{};

    void factor(const double* M) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = M[i * n + j];
                for (int p = 0; p < j; ++p) s -= L[i * n + p] * L[j * n + p];
                if (i == j) {
                    if (!(s > 0.0)) throw StructuralError("reconstruction normal matrix not SPD");
                    L[i * n + i] = std::sqrt(s);
                } else {
                    L[i * n + j] = s / L[j * n + j];
                }
            }
        }
    }
    void solve(double* b) const {
        for (int i = 0; i < n; ++i) {
            for (int p = 0; p < i; ++p) b[i] -= L[i * n + p] * b[p];
            b[i] /= L[i * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int p = i + 1; p < n; ++p) b[i] -= L[p * n + i] * b[p];
            b[i] /= L[i * n + i];
        }
    }
};

inline double lagrange_1d(const std::vector<double>& t, int a, double s) {
    double v = 1.0;
    for (size_t b = 0; b < t.size(); ++b)
        if ((int)b != a) v *= (s - t[b]) / (t[a] - t[b]);
    return v;
}

inline double lagrange_1d_deriv(const std::vector<double>& t, int a, double s) {
    double v = 0.0;
    for (size_t c = 0; c < t.size(); ++c) {
        if ((int)c == a) continue;
        double term = 1.0 / (t[a] - t[c]);
        for (size_t b = 0; b < t.size(); ++b)
            if ((int)b != a && b != c) term *= (s - t[b]) / (t[a] - t[b]);
        v += term;
    }
    return v;
}

} // namespace detail

// Geometry- and degree-dependent tables for the reconstruction; shared by all
// cells of a mesh (both meshes when the spacings agree).
class DfReconstructor {
  public:
    DfReconstructor() = default;
    DfReconstructor(int k, double dx, double dy,
                    const std::vector<double>& target_xi, const std::vector<double>& target_eta)
        : k_(k), n_(k + 2), dx_(dx), dy_(dy), txi_(target_xi), teta_(target_eta) {
        const Quadrature1D gl = gauss_lobatto_nodes(n_);
        tnodes_ = gl.nodes;
        ndof_ = k * k;
        for (int a = 1; a <= k; ++a)
            for (int b = 1; b <= k; ++b) dofs_.push_back({a, b});

        const int P = (int)txi_.size();
        J1_.assign(P * ndof_, 0.0);
        J2_.assign(P * ndof_, 0.0);
        for (int p = 0; p < P; ++p) {
            for (int d = 0; d < ndof_; ++d) {
                const auto [a, b] = dofs_[d];
                J1_[p * ndof_ + d] = detail::lagrange_1d(tnodes_, a, txi_[p]) *
                                     detail::lagrange_1d_deriv(tnodes_, b, teta_[p]) / dy_;
                J2_[p * ndof_ + d] = -detail::lagrange_1d_deriv(tnodes_, a, txi_[p]) *
                                     detail::lagrange_1d(tnodes_, b, teta_[p]) / dx_;
            }
        }
        std::vector<double> NM(ndof_ * ndof_, 0.0);
        for (int d = 0; d < ndof_; ++d)
            for (int e = 0; e < ndof_; ++e) {
                double s = 0.0;
                for (int p = 0; p < P; ++p)
                    s += J1_[p * ndof_ + d] * J1_[p * ndof_ + e] + J2_[p * ndof_ + d] * J2_[p * ndof_ + e];
                NM[d * ndof_ + e] = s;
            }
        chol_.n = ndof_;
        chol_.factor(NM.data());

        // nodal -> modal transfer, exact for the tensor space
        const Quadrature1D gq = gauss_nodes(n_);
        tmat_.assign(n_ * n_, 0.0);
        for (int alpha = 0; alpha < n_; ++alpha)
            for (int a = 0; a < n_; ++a) {
                double s = 0.0;
                for (int q = 0; q < n_; ++q)
                    s += gq.weights[q] * legendre_P(alpha, 2.0 * gq.nodes[q]) *
                         detail::lagrange_1d(tnodes_, a, gq.nodes[q]);
                tmat_[alpha * n_ + a] = s * (2 * alpha + 1);
            }

        // boundary sensitivities at the target nodes
        bsens1_.assign(P * n_ * n_, 0.0);
        bsens2_.assign(P * n_ * n_, 0.0);
        for (int p = 0; p < P; ++p)
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) {
                    if (a >= 1 && a <= k && b >= 1 && b <= k) continue;
                    bsens1_[(p * n_ + a) * n_ + b] = detail::lagrange_1d(tnodes_, a, txi_[p]) *
                                                     detail::lagrange_1d_deriv(tnodes_, b, teta_[p]) / dy_;
                    bsens2_[(p * n_ + a) * n_ + b] = -detail::lagrange_1d_deriv(tnodes_, a, txi_[p]) *
                                                     detail::lagrange_1d(tnodes_, b, teta_[p]) / dx_;
                }
    }

    // Edge order: left, right (b^x along x = const), bottom, top (b^y).
    // target1/target2: desired (B1, B2) at the target nodes.
    DivFreeField reconstruct(const EdgePoly& left, const EdgePoly& right,
                             const EdgePoly& bottom, const EdgePoly& top,
                             const std::vector<double>& target1,
                             const std::vector<double>& target2,
                             double closure_tol = 1e-10) const {
        const double res = compatibility_residual(left, right, bottom, top, dx_, dy_);
        double scale = 1.0;
        for (const EdgePoly* e : {&left, &right, &bottom, &top})
            for (int m = 0; m < e->N; ++m) scale = std::max(scale, std::abs(e->c[m]));
        if (std::abs(res) > closure_tol * scale * (dx_ + dy_))
            throw StructuralError("divergence-free reconstruction: loop closure violated, residual=" +
                                  std::to_string(res));

        // Nodal potential values on the boundary from edge integrals.
        // A(x,y) anchored at the lower-left corner.
        const int n = n_;
        std::vector<double> Anod(n * n, 0.0);
        const double A10 = -edge_integral_to(bottom, dx_, 0.5);
        const double A01 = edge_integral_to(left, dy_, 0.5);
        const double A11 = A10 + edge_integral_to(right, dy_, 0.5);
        const double rtop = A11 - (A01 - edge_integral_to(top, dx_, 0.5));
        for (int t = 0; t < n; ++t) {
            const double s = tnodes_[t];
            Anod[0 * n + t] = edge_integral_to(left, dy_, s);                // x = X0
            Anod[(n - 1) * n + t] = A10 + edge_integral_to(right, dy_, s);   // x = X1
            Anod[t * n + 0] = -edge_integral_to(bottom, dx_, s);             // y = Y0
            Anod[t * n + (n - 1)] = A01 - edge_integral_to(top, dx_, s) + (s + 0.5) * rtop;
        }
        Anod[0] = 0.0;
        Anod[(n - 1) * n] = A10;
        Anod[0 * n + (n - 1)] = A01;
        Anod[(n - 1) * n + (n - 1)] = A11;

        // Field due to boundary data at the target nodes.
        const int P = (int)txi_.size();
        std::vector<double> r1(P), r2(P);
        for (int p = 0; p < P; ++p) {
            double b1 = 0.0, b2 = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const double v = Anod[a * n + b];
                    if (v == 0.0) continue;
                    b1 += bsens1_[(p * n + a) * n + b] * v;
                    b2 += bsens2_[(p * n + a) * n + b] * v;
                }
            r1[p] = target1[p] - b1;
            r2[p] = target2[p] - b2;
        }

        // Interior least squares.
        std::array<double, 9> rhs{};
        for (int d = 0; d < ndof_; ++d) {
            double s = 0.0;
            for (int p = 0; p < P; ++p)
                s += J1_[p * ndof_ + d] * r1[p] + J2_[p * ndof_ + d] * r2[p];
            rhs[d] = s;
        }
        chol_.solve(rhs.data());
        for (int d = 0; d < ndof_; ++d) {
            const auto [a, b] = dofs_[d];
            Anod[a * n + b] = rhs[d];
        }

        // Nodal -> modal, then differentiate in coefficient space.
        DivFreeField f;
        f.k = k_;
        f.n = n;
        std::array<double, kMaxPotCoef> tmp{};
        for (int alpha = 0; alpha < n; ++alpha)
            for (int b = 0; b < n; ++b) {
                double s = 0.0;
                for (int a = 0; a < n; ++a) s += tmat_[alpha * n + a] * Anod[a * n + b];
                tmp[alpha * n + b] = s;
            }
        for (int alpha = 0; alpha < n; ++alpha)
            for (int beta = 0; beta < n; ++beta) {
                double s = 0.0;
                for (int b = 0; b < n; ++b) s += tmat_[beta * n + b] * tmp[alpha * n + b];
                f.A[alpha * n + beta] = s;
            }
        const TensorBasis tb(n - 1);
        std::array<double, kMaxPotCoef> d{};
        tb.deta_coeffs(f.A.data(), d.data());
        for (int i = 0; i < n * n; ++i) f.B1[i] = d[i] / dy_;
        tb.dxi_coeffs(f.A.data(), d.data());
        for (int i = 0; i < n * n; ++i) f.B2[i] = -d[i] / dx_;
        return f;
    }

    int k() const { return k_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }

  private:
    int k_ = 2, n_ = 4, ndof_ = 4;
    double dx_ = 1.0, dy_ = 1.0;
    std::vector<double> txi_, teta_;
    std::vector<double> tnodes_;
    std::vector<std::pair<int, int>> dofs_;
    std::vector<double> J1_, J2_;
    std::vector<double> bsens1_, bsens2_;
    std::vector<double> tmat_;
    detail::SmallCholesky<9> chol_;
};

// Max |dB1/dx + dB2/dy| over the sample points (should vanish to rounding).
inline double max_pointwise_divergence(const DivFreeField& f, double dx, double dy,
                                       const std::vector<double>& xi,
                                       const std::vector<double>& eta) {
    const int n = f.n;
    const TensorBasis tb(n - 1);
    std::array<double, kMaxPotCoef> d1{}, d2{}, div{};
    tb.dxi_coeffs(f.B1.data(), d1.data());
    tb.deta_coeffs(f.B2.data(), d2.data());
    for (int i = 0; i < n * n; ++i) div[i] = d1[i] / dx + d2[i] / dy;
    double m = 0.0;
    for (size_t p = 0; p < xi.size(); ++p)
        m = std::max(m, std::abs(tb.eval(div.data(), xi[p], eta[p])));
    return m;
}

} // namespace posdiv
