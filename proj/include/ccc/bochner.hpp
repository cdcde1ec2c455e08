#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "ccc/levi_civita.hpp"
#include "ccc/tensor.hpp"

namespace ccc {

// ============================================================================
// Bochner curvature
// ============================================================================
//
// The trace adjustment tensor
//
//   Q = ρ/(2(n+2)) − τ·g/(8(n+1)(n+2))
//
// is calibrated so that the Hermitian curvature-type correction C[Q] built
// from it (see hermitian_correction) has Ricci contraction exactly ρ.  The
// difference
//
//   B = R − C[Q]
//
// is then the trace-free part of the curvature with respect to the Kähler
// structure; a metric is "Bochner-flat" when B vanishes identically.  On
// such metrics the Ricci derivative collapses to a combination of scalar
// gradients (nabla_rho_identity_residual measures this) and
//
//   𝔅 = ‖ρ‖² − τ²/(2(n+1)) + Δτ/(n+1)
//
// is a constant (bochner_constant evaluates it pointwise; constancy is a
// property checked over samples).

/// Default verdict tolerance for the normalized Bochner-flatness residual.
inline constexpr double kBochnerFlatTol = 1e-7;

/// The Hermitian curvature-type correction C[A] of a symmetric (0,2) tensor
/// A.  With Â the raise of A, vectors X = e_i, Y = e_j, Z = e_k and output
/// slot l (layout [l][k][i][j], matching CurvatureBundle::riemann_up):
///
///   C[A](X,Y)Z = A(Y,Z)X − A(X,Z)Y + g(Y,Z)ÂX − g(X,Z)ÂY
///              + A(JY,Z)JX − A(JX,Z)JY − 2A(JX,Y)JZ
///              + g(JY,Z)JÂX − g(JX,Z)JÂY − 2g(JX,Y)JÂZ.
///
/// For Hermitian A the Ricci-type contraction of C[A] is
/// (2n+4)A + tr(Â)·g, which is the design point of Q above.
inline TensorValue hermitian_correction(const TensorValue& a_low, const MetricFrame& f) {
    const int d = f.dim;
    if (a_low.dim() != d || a_low.variance() != std::vector<bool>{false, false})
        throw SpecError("hermitian_correction: A must be a (0,2) tensor on the frame's chart");

    // Â^l_i = g^{lm} A_{mi};  (AJ)_{ik} = A(Je_i, e_k) = J^m_i A_{mk};
    // (JÂ)^l_i = J^l_m Â^m_i.
    std::vector<double> a_up(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> aj(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> j_a_up(static_cast<std::size_t>(d) * d, 0.0);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i) {
            double up = 0.0, cj = 0.0;
            for (int m = 0; m < d; ++m) {
                up += f.g_inv_at(l, m) * a_low(m, i);
                cj += f.J_at(m, l) * a_low(m, i);
            }
            a_up[linalg::at(d, l, i)] = up;
            aj[linalg::at(d, l, i)] = cj;  // (AJ)_{li}
        }
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i) {
            double v = 0.0;
            for (int m = 0; m < d; ++m) v += f.J_at(l, m) * a_up[linalg::at(d, m, i)];
            j_a_up[linalg::at(d, l, i)] = v;
        }

    TensorValue c(d, {true, false, false, false}, f.point);
    auto A = [&](int i, int j) { return a_low(i, j); };
    auto Aup = [&](int l, int i) { return a_up[linalg::at(d, l, i)]; };
    auto AJ = [&](int i, int j) { return aj[linalg::at(d, i, j)]; };
    auto JAup = [&](int l, int i) { return j_a_up[linalg::at(d, l, i)]; };
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double v = 0.0;
                    if (l == i) v += A(j, k);
                    if (l == j) v -= A(i, k);
                    v += f.g_at(j, k) * Aup(l, i) - f.g_at(i, k) * Aup(l, j);
                    v += AJ(j, k) * f.J_at(l, i) - AJ(i, k) * f.J_at(l, j) -
                         2.0 * AJ(i, j) * f.J_at(l, k);
                    v += f.Omega_at(j, k) * JAup(l, i) - f.Omega_at(i, k) * JAup(l, j) -
                         2.0 * f.Omega_at(i, j) * JAup(l, k);
                    c(l, k, i, j) = v;
                }
    return c;
}

struct QTensor {
    TensorValue low;  // Q_{ij}
    TensorValue up;   // Q^i_j
};

/// Q = ρ/(2(n+2)) − τ·g/(8(n+1)(n+2)) and its raise.
inline QTensor q_tensor(const CurvatureBundle& b, const MetricFrame& f) {
    const int d = f.dim;
    const int n = d / 2;
    const double rho_coef = 1.0 / (2.0 * (n + 2));
    const double tau_coef = b.tau / (8.0 * (n + 1) * (n + 2));
    TensorValue low(d, {false, false}, f.point);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            low(i, j) = rho_coef * b.ricci_at(i, j) - tau_coef * f.g_at(i, j);
    TensorValue up = musical(low, 0, Musical::Raise, f);
    return {std::move(low), std::move(up)};
}

/// Fully lowered Bochner curvature B_{lkij} = R_{lkij} − C[Q]_{lkij}.
inline TensorValue bochner_tensor(const CurvatureBundle& b, const MetricFrame& f) {
    const int d = f.dim;
    QTensor q = q_tensor(b, f);
    TensorValue corr = hermitian_correction(q.low, f);  // C^l_{kij}
    TensorValue out(d, {false, false, false, false}, f.point);
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double c_low = 0.0;
                    for (int m = 0; m < d; ++m) c_low += f.g_at(l, m) * corr(m, k, i, j);
                    out(l, k, i, j) = b.riemann_low_at(l, k, i, j) - c_low;
                }
    return out;
}

/// Max-normalized residual of the Ricci-derivative identity that holds on
/// Bochner-flat metrics:
///
///   (∇_X ρ)(Y,Z) = [1/(4(n+1))]·{2dτ(X)g(Y,Z) + dτ(Y)g(X,Z) + dτ(Z)g(X,Y)
///                                + dτ(JY)g(X,JZ) + dτ(JZ)g(X,JY)}
///
/// Returns max over basis triples of |LHS − RHS| / max(1, max|∇ρ|).
inline double nabla_rho_identity_residual(const CurvatureBundle& b, const MetricFrame& f) {
    const int d = f.dim;
    const int n = d / 2;
    const double coef = 1.0 / (4.0 * (n + 1));
    std::vector<double> dtau_j = covector_J(f, b.dtau);  // dτ(J e_i)
    double scale = 1.0;
    for (double v : b.nabla_rho) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    // X = e_k (derivative slot), Y = e_i, Z = e_j;
    // g(X, JZ) = g(e_k, J e_j) = Ω_{jk}.
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double rhs = coef * (2.0 * b.dtau[static_cast<std::size_t>(k)] * f.g_at(i, j) +
                                     b.dtau[static_cast<std::size_t>(i)] * f.g_at(k, j) +
                                     b.dtau[static_cast<std::size_t>(j)] * f.g_at(k, i) +
                                     dtau_j[static_cast<std::size_t>(i)] * f.Omega_at(j, k) +
                                     dtau_j[static_cast<std::size_t>(j)] * f.Omega_at(i, k));
                worst = std::max(worst, std::abs(b.nabla_rho_at(k, i, j) - rhs));
            }
    return worst / scale;
}

/// 𝔅 = ‖ρ‖² − τ²/(2(n+1)) + Δτ/(n+1); a constant on Bochner-flat metrics.
inline double bochner_constant(const CurvatureBundle& b) {
    const int n = b.dim / 2;
    return b.ricci_norm_sq - b.tau * b.tau / (2.0 * (n + 1)) + b.laplace_tau / (n + 1);
}

struct BochnerData {
    int dim;
    std::vector<double> point;
    QTensor q;
    TensorValue b_low;                   // B_{lkij}
    double bochner_flat_residual;        // max|B| / max(1, max|R_low|)
    double nabla_rho_residual;
    double frak_b;
};

/// Everything the Bochner layer derives from one curvature bundle.
inline BochnerData bochner_data(const ManifoldSpec& spec, std::span<const double> point) {
    MetricFrame f = metric_frame(spec, point);
    CurvatureBundle b = curvature_bundle(spec, point);
    QTensor q = q_tensor(b, f);
    TensorValue b_low = bochner_tensor(b, f);
    double r_scale = 1.0;
    for (double v : b.riemann_low) r_scale = std::max(r_scale, std::abs(v));
    double flat_residual = b_low.max_abs() / r_scale;
    double nr_residual = nabla_rho_identity_residual(b, f);
    return BochnerData{f.dim,
                       std::vector<double>(point.begin(), point.end()),
                       std::move(q),
                       std::move(b_low),
                       flat_residual,
                       nr_residual,
                       bochner_constant(b)};
}

inline double nabla_rho_identity_residual(const ManifoldSpec& spec,
                                          std::span<const double> point) {
    MetricFrame f = metric_frame(spec, point);
    CurvatureBundle b = curvature_bundle(spec, point);
    return nabla_rho_identity_residual(b, f);
}

inline double bochner_constant(const ManifoldSpec& spec, std::span<const double> point) {
    return bochner_constant(curvature_bundle(spec, point));
}

struct ResidualStats {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    int points = 0;
    double tol = 0.0;
    bool pass = false;
};

/// Normalized Bochner-flatness residual over a sample: per-point
/// max|B| / max(1, max|R|), aggregated as max and mean, with a verdict
/// against `tol`.
inline ResidualStats bochner_flat_residual(const ManifoldSpec& spec,
                                           const std::vector<std::vector<double>>& points,
                                           double tol = kBochnerFlatTol) {
    if (points.empty()) throw SpecError("bochner_flat_residual: empty sample");
    ResidualStats st;
    st.points = static_cast<int>(points.size());
    st.tol = tol;
    double sum = 0.0;
    for (const auto& p : points) {
        double r = bochner_data(spec, p).bochner_flat_residual;
        st.max_residual = std::max(st.max_residual, r);
        sum += r;
    }
    st.mean_residual = sum / static_cast<double>(points.size());
    st.pass = st.max_residual < tol;
    return st;
}

}  // namespace ccc
