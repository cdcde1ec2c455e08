#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ccc/bochner.hpp"
#include "ccc/jet.hpp"
#include "ccc/levi_civita.hpp"
#include "ccc/manifold.hpp"
#include "ccc/tensor.hpp"

namespace ccc {

// ============================================================================
// Complex conformal connection
// ============================================================================
//
// Given a Kähler structure (g, J) and a scalar potential u, the Lee form
// ω = du and its metric dual P = grad u determine a complex conformal
// connection
//
//   𝒟_X Y = ∇_X Y + ω(X)Y + ω(Y)X − g(X,Y)P
//          − ω(JX)JY − ω(JY)JX − g(JX,Y)JP,
//
// the unique connection with 𝒟J = 0, 𝒟g = −2ω⊗g, and torsion
// 𝒯 = −2Ω⊗JP (where Ω(X,Y) = g(JX,Y)).  Equivalently, for the rescaled
// metric ḡ = e^{2u} g it satisfies 𝒟ḡ = 0 with torsion −Ω̄⊗JP̄, where
// Ω̄ = e^{2u}Ω and P̄ = 2e^{−2u}P is the ḡ-dual of the Lee covector 2ω
// of ḡ.
//
// The curvature ℛ of 𝒟 is computed directly from the coefficient field of
// 𝒟 with the same convention as the Levi-Civita curvature:
//
//   ℛ^l_{kij} = ∂_i D^l_{jk} − ∂_j D^l_{ik}
//             + D^l_{im} D^m_{jk} − D^l_{jm} D^m_{ik},
//
// so ℛ(e_i,e_j)e_k = ℛ^l_{kij} e_l (layout [l][k][i][j], matching
// CurvatureBundle::riemann_up).  An expansion of ℛ in terms of R, ∇ω, ∇P
// holds for every potential and serves as an independent cross-check
// (curvature_identity below); when the Lee form satisfies
//
//   (∇_X ω)(Y) + 2ω(JX)ω(JY) + ω(P)g(X,Y) = 0
//
// (equivalently 𝒟P = 0), the expansion collapses to ℛ = R + C[L] with
// L(X,Y) = ω(X)ω(Y) + ω(JX)ω(JY) + ½ω(P)g(X,Y) and C[·] the Hermitian
// curvature-type correction shared with the Bochner decomposition.
//
// The connection is *flat* when ℛ vanishes identically; flatness_verdict
// samples the normalized curvature over the declared box.

/// Default verdict tolerance for the normalized flatness residual.
inline constexpr double kFlatConnectionTol = 1e-7;

/// Gate under which the Lee form counts as parallel, enabling the reduced
/// curvature identity ℛ = R + C[L].
inline constexpr double kLeeParallelGate = 1e-7;

/// Pointwise data of the Lee form ω = du and its duals.
struct LeeData {
    int dim = 0;
    std::vector<double> point;
    double u = 0.0;                 // potential value
    double conformal_factor = 0.0;  // e^{2u}
    std::vector<double> omega;      // ω_i = ∂_i u
    std::vector<double> omega_J;    // (ωJ)_i = ω(J e_i) = ω_m J^m_i
    std::vector<double> P;          // P^k = g^{km} ω_m
    std::vector<double> JP;         // (JP)^k = J^k_m P^m
    std::vector<double> lee_bar;    // Lee covector of ḡ = e^{2u} g: 2 ω_i
    double omega_P = 0.0;           // ω(P) = ‖ω‖²_g ≥ 0
};

/// Residuals of the defining conditions of 𝒟, each the max-abs component
/// value at the point.
struct DefiningConditionResiduals {
    double complex_structure = 0.0;  // max |𝒟J|
    double metric = 0.0;             // max |𝒟g + 2ω⊗g|
    double torsion = 0.0;            // max |𝒯 + 2Ω⊗JP|
    double metric_rescaled = 0.0;    // max |𝒟(e^{2u}g)|
    double torsion_rescaled = 0.0;   // max |𝒯 + Ω̄⊗JP̄|
};

/// Residuals of the curvature relations at a point.
struct ConnectionRelations {
    /// Normalized residual of the all-potentials expansion of ℛ in terms of
    /// R, ∇ω, ∇P (scale: max(1, max|ℛ|, max|R|)).
    double curvature_identity = 0.0;
    /// max |(∇ω)(X,Y) + 2ω(JX)ω(JY) + ω(P)g(X,Y)| — zero iff the Lee form
    /// is 𝒟-parallel.
    double lee_parallel = 0.0;
    /// max |𝒟P| — vanishes together with lee_parallel.
    double lee_vector_parallel = 0.0;
    /// Normalized residual of ℛ = R + C[L]; present only when lee_parallel
    /// is below the gate passed to relation_residuals.
    std::optional<double> reduced_identity;
};

/// Everything the connection determines at one point.
struct ConformalData {
    int dim = 0;
    std::vector<double> point;
    LeeData lee;
    MetricFrame frame;
    CurvatureBundle base;     // Levi-Civita data at the same point
    TensorValue d_coeffs;     // D^k_{ij}: 𝒟_{e_i} e_j = D^k_{ij} e_k, layout [k][i][j]
    TensorValue torsion;      // 𝒯^k_{ij} = D^k_{ij} − D^k_{ji}
    TensorValue curvature;    // ℛ^l_{kij}, layout [l][k][i][j]
    TensorValue nabla_omega;  // (∇_i ω)_j (Levi-Civita), layout [i][j]
    TensorValue nabla_P;      // (∇_i P)^k, layout [k][i]
    TensorValue nabla_JP;     // (∇_i JP)^k, layout [k][i]
    TensorValue l_tensor;     // L_{ij} = ω_iω_j + (ωJ)_i(ωJ)_j + ½ω(P)g_{ij}
    DefiningConditionResiduals defining;
};

namespace detail {

inline LeeData lee_from(const MetricFrame& f, std::span<const double> point, double u,
                        std::span<const double> omega) {
    const int d = f.dim;
    LeeData lee;
    lee.dim = d;
    lee.point.assign(point.begin(), point.end());
    lee.u = u;
    lee.conformal_factor = std::exp(2.0 * u);
    lee.omega.assign(omega.begin(), omega.end());
    lee.omega_J.assign(static_cast<std::size_t>(d), 0.0);
    lee.P.assign(static_cast<std::size_t>(d), 0.0);
    lee.JP.assign(static_cast<std::size_t>(d), 0.0);
    lee.lee_bar.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        double oj = 0.0, p = 0.0;
        for (int m = 0; m < d; ++m) {
            oj += lee.omega[static_cast<std::size_t>(m)] * f.J_at(m, i);
            p += f.g_inv_at(i, m) * lee.omega[static_cast<std::size_t>(m)];
        }
        lee.omega_J[static_cast<std::size_t>(i)] = oj;
        lee.P[static_cast<std::size_t>(i)] = p;
        lee.lee_bar[static_cast<std::size_t>(i)] = 2.0 * lee.omega[static_cast<std::size_t>(i)];
    }
    for (int k = 0; k < d; ++k) {
        double jp = 0.0;
        for (int m = 0; m < d; ++m) jp += f.J_at(k, m) * lee.P[static_cast<std::size_t>(m)];
        lee.JP[static_cast<std::size_t>(k)] = jp;
    }
    lee.omega_P = 0.0;
    for (int i = 0; i < d; ++i)
        lee.omega_P += lee.omega[static_cast<std::size_t>(i)] * lee.P[static_cast<std::size_t>(i)];
    return lee;
}

inline const Jet& require_potential_jet(const Jet& u_jet, int dim) {
    if (!u_jet.valid() || u_jet.order() < 2)
        throw SpecError("conformal connection: the potential jet must carry order >= 2");
    if (u_jet.dim() != dim)
        throw SpecError("conformal connection: potential jet dimension mismatch");
    return u_jet;
}

inline Jet spec_potential_jet(const ManifoldSpec& spec, std::span<const double> point, int order) {
    if (!spec.has_potential())
        throw SpecError("spec '" + spec.name +
                        "' carries no scalar potential; attach one to build the "
                        "conformal connection");
    return detail::expr_jet_unchecked(*spec.potential_u, point, order);
}

}  // namespace detail

/// Lee form data from the spec's potential at `point`.
inline LeeData lee_data(const ManifoldSpec& spec, std::span<const double> point) {
    MetricFrame frame = metric_frame(spec, point);
    Jet u = detail::spec_potential_jet(spec, point, 1);
    std::vector<double> omega(static_cast<std::size_t>(frame.dim), 0.0);
    for (int i = 0; i < frame.dim; ++i) omega[static_cast<std::size_t>(i)] = u.first(i);
    return detail::lee_from(frame, point, u.value(), omega);
}

/// Full connection data at `point`, with the potential supplied as a jet of
/// order >= 2 (its value, gradient, and Hessian are consumed).  This is the
/// entry point for potentials constructed from other jets, e.g. from scalar
/// curvature; the spec's own potential is ignored.
inline ConformalData conformal_data(const ManifoldSpec& spec, std::span<const double> point,
                                    const Jet& u_jet_in) {
    MetricFrame frame = metric_frame(spec, point);
    const int d = frame.dim;
    const Jet& u_full = detail::require_potential_jet(u_jet_in, d);

    // Order-1 jets of every ingredient: the coefficient field D is pointwise
    // algebra in (Γ, ω, g, g⁻¹, J), so first derivatives of the ingredients
    // determine first derivatives of D — all the curvature needs.
    ChartJets cj = chart_jets(spec, point, 3);
    CurvatureJets ct = curvature_jets(cj);
    CurvatureBundle base = curvature_bundle(spec, point);

    const auto sz2 = static_cast<std::size_t>(d) * d;
    const auto sz3 = sz2 * static_cast<std::size_t>(d);

    std::vector<Jet> om(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) om[static_cast<std::size_t>(i)] = u_full.derivative_jet(i).truncated(1);
    std::vector<Jet> gj(sz2), ginvj(sz2), Jj(sz2);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            gj[static_cast<std::size_t>(i) * d + j] = cj.g_at(i, j).truncated(1);
            ginvj[static_cast<std::size_t>(i) * d + j] = cj.g_inv_at(i, j).truncated(1);
            Jj[static_cast<std::size_t>(i) * d + j] = cj.J_at(i, j).truncated(1);
        }
    auto at2 = [d](int i, int j) { return static_cast<std::size_t>(i) * d + j; };

    // Derived jet fields: P^k, (ωJ)_i, (JP)^k, Ω_ij, and e^{2u}.
    std::vector<Jet> Pj(static_cast<std::size_t>(d)), omJ(static_cast<std::size_t>(d)),
        JPj(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        Jet p = Jet::constant(0.0, d, 1);
        Jet oj = Jet::constant(0.0, d, 1);
        for (int m = 0; m < d; ++m) {
            p += ginvj[at2(k, m)] * om[static_cast<std::size_t>(m)];
            oj += om[static_cast<std::size_t>(m)] * Jj[at2(m, k)];
        }
        Pj[static_cast<std::size_t>(k)] = p;
        omJ[static_cast<std::size_t>(k)] = oj;
    }
    for (int k = 0; k < d; ++k) {
        Jet jp = Jet::constant(0.0, d, 1);
        for (int m = 0; m < d; ++m) jp += Jj[at2(k, m)] * Pj[static_cast<std::size_t>(m)];
        JPj[static_cast<std::size_t>(k)] = jp;
    }
    std::vector<Jet> Omj(sz2);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet o = Jet::constant(0.0, d, 1);
            for (int m = 0; m < d; ++m) o += Jj[at2(m, i)] * gj[at2(m, j)];
            Omj[at2(i, j)] = o;
        }
    Jet e2u = exp(u_full.truncated(1) * 2.0);

    // Coefficient field D^k_{ij} of 𝒟 as order-1 jets.
    std::vector<Jet> Dj(sz3);
    auto at3 = [d](int k, int i, int j) {
        return (static_cast<std::size_t>(k) * d + i) * d + j;
    };
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet v = ct.Gamma_at(k, i, j).truncated(1);
                if (k == j) v += om[static_cast<std::size_t>(i)];
                if (k == i) v += om[static_cast<std::size_t>(j)];
                v -= gj[at2(i, j)] * Pj[static_cast<std::size_t>(k)];
                v -= omJ[static_cast<std::size_t>(i)] * Jj[at2(k, j)];
                v -= omJ[static_cast<std::size_t>(j)] * Jj[at2(k, i)];
                v -= Omj[at2(i, j)] * JPj[static_cast<std::size_t>(k)];
                Dj[at3(k, i, j)] = v;
            }

    std::vector<double> pt(point.begin(), point.end());
    std::vector<double> omega_vals(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) omega_vals[static_cast<std::size_t>(i)] = om[static_cast<std::size_t>(i)].value();
    LeeData lee = detail::lee_from(frame, point, u_full.value(), omega_vals);

    TensorValue d_coeffs(d, {true, false, false}, pt);
    TensorValue torsion(d, {true, false, false}, pt);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                d_coeffs(k, i, j) = Dj[at3(k, i, j)].value();
                torsion(k, i, j) = Dj[at3(k, i, j)].value() - Dj[at3(k, j, i)].value();
            }

    // ℛ^l_{kij} from the coefficient field (Levi-Civita curvature convention).
    TensorValue curvature(d, {true, false, false, false}, pt);
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double v = Dj[at3(l, j, k)].first(i) - Dj[at3(l, i, k)].first(j);
                    for (int m = 0; m < d; ++m)
                        v += Dj[at3(l, i, m)].value() * Dj[at3(m, j, k)].value() -
                             Dj[at3(l, j, m)].value() * Dj[at3(m, i, k)].value();
                    curvature(l, k, i, j) = v;
                }

    // Levi-Civita derivatives of ω, P, JP (used by the curvature identity).
    TensorValue nabla_omega(d, {false, false}, pt);
    TensorValue nabla_P(d, {true, false}, pt);
    TensorValue nabla_JP(d, {true, false}, pt);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double no = om[static_cast<std::size_t>(j)].first(i);
            double np = Pj[static_cast<std::size_t>(j)].first(i);
            double njp = JPj[static_cast<std::size_t>(j)].first(i);
            for (int m = 0; m < d; ++m) {
                no -= base.gamma_at(m, i, j) * omega_vals[static_cast<std::size_t>(m)];
                np += base.gamma_at(j, i, m) * Pj[static_cast<std::size_t>(m)].value();
                njp += base.gamma_at(j, i, m) * JPj[static_cast<std::size_t>(m)].value();
            }
            nabla_omega(i, j) = no;
            nabla_P(j, i) = np;
            nabla_JP(j, i) = njp;
        }

    TensorValue l_tensor(d, {false, false}, pt);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            l_tensor(i, j) = lee.omega[static_cast<std::size_t>(i)] * lee.omega[static_cast<std::size_t>(j)] +
                             lee.omega_J[static_cast<std::size_t>(i)] * lee.omega_J[static_cast<std::size_t>(j)] +
                             0.5 * lee.omega_P * frame.g_at(i, j);

    // Defining conditions, evaluated literally from the jets.
    DefiningConditionResiduals def;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j) {
                // (𝒟_i J)^k_j
                double dj = Jj[at2(k, j)].first(i);
                for (int m = 0; m < d; ++m)
                    dj += Dj[at3(k, i, m)].value() * Jj[at2(m, j)].value() -
                          Dj[at3(m, i, j)].value() * Jj[at2(k, m)].value();
                def.complex_structure = std::max(def.complex_structure, std::abs(dj));

                // (𝒟_i g)_{jk} + 2 ω_i g_{jk}
                double dg = gj[at2(j, k)].first(i);
                for (int m = 0; m < d; ++m)
                    dg -= Dj[at3(m, i, j)].value() * gj[at2(m, k)].value() +
                          Dj[at3(m, i, k)].value() * gj[at2(j, m)].value();
                def.metric = std::max(
                    def.metric, std::abs(dg + 2.0 * omega_vals[static_cast<std::size_t>(i)] *
                                                  gj[at2(j, k)].value()));

                // (𝒟_i ḡ)_{jk} with ḡ = e^{2u} g
                double dgbar = (e2u * gj[at2(j, k)]).first(i);
                for (int m = 0; m < d; ++m)
                    dgbar -= Dj[at3(m, i, j)].value() * e2u.value() * gj[at2(m, k)].value() +
                             Dj[at3(m, i, k)].value() * e2u.value() * gj[at2(j, m)].value();
                def.metric_rescaled = std::max(def.metric_rescaled, std::abs(dgbar));

                // 𝒯^k_{ij} + 2 Ω_{ij} (JP)^k, and the ḡ-form with
                // Ω̄ = e^{2u} Ω, JP̄ = 2 e^{−2u} JP (the rescalings cancel).
                double t = torsion(k, i, j);
                double om_ij = Omj[at2(i, j)].value();
                double jp = lee.JP[static_cast<std::size_t>(k)];
                def.torsion = std::max(def.torsion, std::abs(t + 2.0 * om_ij * jp));
                def.torsion_rescaled =
                    std::max(def.torsion_rescaled,
                             std::abs(t + (e2u.value() * om_ij) * (2.0 / e2u.value()) * jp));
            }

    return ConformalData{d,
                         std::move(pt),
                         std::move(lee),
                         std::move(frame),
                         std::move(base),
                         std::move(d_coeffs),
                         std::move(torsion),
                         std::move(curvature),
                         std::move(nabla_omega),
                         std::move(nabla_P),
                         std::move(nabla_JP),
                         std::move(l_tensor),
                         def};
}

/// Full connection data from the spec's own potential.
inline ConformalData conformal_data(const ManifoldSpec& spec, std::span<const double> point) {
    return conformal_data(spec, point, detail::spec_potential_jet(spec, point, 2));
}

/// Coefficient field D^k_{ij} of 𝒟 (layout [k][i][j], i the direction).
inline TensorValue ccc_coefficients(const ManifoldSpec& spec, std::span<const double> point) {
    return conformal_data(spec, point).d_coeffs;
}

/// Curvature ℛ^l_{kij} of 𝒟 (layout [l][k][i][j]).
inline TensorValue ccc_curvature(const ManifoldSpec& spec, std::span<const double> point) {
    return conformal_data(spec, point).curvature;
}

inline DefiningConditionResiduals defining_condition_residuals(const ManifoldSpec& spec,
                                                               std::span<const double> point) {
    return conformal_data(spec, point).defining;
}

/// Curvature relation residuals from precomputed connection data.
inline ConnectionRelations relation_residuals(const ConformalData& cd,
                                              double gate = kLeeParallelGate) {
    const int d = cd.dim;
    const MetricFrame& f = cd.frame;
    const LeeData& lee = cd.lee;
    const double half_op = 0.5 * lee.omega_P;

    auto om = [&](int i) { return lee.omega[static_cast<std::size_t>(i)]; };
    auto omj = [&](int i) { return lee.omega_J[static_cast<std::size_t>(i)]; };
    auto Pv = [&](int k) { return lee.P[static_cast<std::size_t>(k)]; };
    auto JPv = [&](int k) { return lee.JP[static_cast<std::size_t>(k)]; };

    // (∇_a ω)(J e_b) and the scalar blocks of the expansion.
    std::vector<double> noJ(static_cast<std::size_t>(d) * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double v = 0.0;
            for (int m = 0; m < d; ++m) v += cd.nabla_omega(a, m) * f.J_at(m, b);
            noJ[static_cast<std::size_t>(a) * d + b] = v;
        }
    auto S = [&](int a, int b) {
        return cd.nabla_omega(a, b) - om(a) * om(b) + omj(a) * omj(b) + half_op * f.g_at(a, b);
    };
    auto SJ = [&](int a, int b) {
        return noJ[static_cast<std::size_t>(a) * d + b] - om(a) * omj(b) - omj(a) * om(b) +
               half_op * f.Omega_at(b, a);
    };
    auto V = [&](int l, int a) {
        return cd.nabla_P(l, a) - om(a) * Pv(l) - omj(a) * JPv(l) +
               (l == a ? half_op : 0.0);
    };
    auto W = [&](int l, int a) {
        return cd.nabla_JP(l, a) - om(a) * JPv(l) + omj(a) * Pv(l) + half_op * f.J_at(l, a);
    };

    double max_resid = 0.0, max_script = 0.0, max_base = 0.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double rhs = cd.base.riemann_at(l, k, i, j);
                    if (l == i) rhs -= S(j, k);
                    if (l == j) rhs += S(i, k);
                    rhs -= f.g_at(j, k) * V(l, i) - f.g_at(i, k) * V(l, j);
                    rhs += SJ(j, k) * f.J_at(l, i) - SJ(i, k) * f.J_at(l, j);
                    rhs += f.Omega_at(k, j) * W(l, i) - f.Omega_at(k, i) * W(l, j);
                    rhs += (noJ[static_cast<std::size_t>(j) * d + i] -
                            noJ[static_cast<std::size_t>(i) * d + j]) *
                           f.J_at(l, k);
                    rhs += 2.0 * f.Omega_at(j, i) * (omj(k) * Pv(l) + om(k) * JPv(l));

                    double script = cd.curvature(l, k, i, j);
                    max_resid = std::max(max_resid, std::abs(script - rhs));
                    max_script = std::max(max_script, std::abs(script));
                    max_base = std::max(max_base, std::abs(cd.base.riemann_at(l, k, i, j)));
                }

    ConnectionRelations rel;
    const double scale = std::max({1.0, max_script, max_base});
    rel.curvature_identity = max_resid / scale;

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            rel.lee_parallel = std::max(
                rel.lee_parallel, std::abs(cd.nabla_omega(i, j) + 2.0 * omj(i) * omj(j) +
                                           lee.omega_P * f.g_at(i, j)));

    // (𝒟_i P)^k = (∇_i P)^k + (D − Γ)^k_{im} P^m.
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            double v = cd.nabla_P(k, i);
            for (int m = 0; m < d; ++m)
                v += (cd.d_coeffs(k, i, m) - cd.base.gamma_at(k, i, m)) * Pv(m);
            rel.lee_vector_parallel = std::max(rel.lee_vector_parallel, std::abs(v));
        }

    if (rel.lee_parallel < gate) {
        TensorValue corr = hermitian_correction(cd.l_tensor, f);
        double resid = 0.0;
        for (int l = 0; l < d; ++l)
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        resid = std::max(resid,
                                         std::abs(cd.curvature(l, k, i, j) -
                                                  cd.base.riemann_at(l, k, i, j) -
                                                  corr(l, k, i, j)));
        rel.reduced_identity = resid / scale;
    }
    return rel;
}

inline ConnectionRelations relation_residuals(const ManifoldSpec& spec,
                                              std::span<const double> point,
                                              double gate = kLeeParallelGate) {
    return relation_residuals(conformal_data(spec, point), gate);
}

/// Sampled flatness verdict for the connection built from the spec's
/// potential.  The curvature at each point is normalized by max(1, |τ|),
/// the natural curvature scale (on a flat metric the floor keeps the
/// residual absolute).
struct FlatnessVerdict {
    bool pass = false;
    int points = 0;
    double tol = 0.0;
    double max_normalized_curvature = 0.0;
    double mean_normalized_curvature = 0.0;
    double max_lee_parallel = 0.0;  // reported alongside: flatness forces it to zero
};

inline FlatnessVerdict flatness_verdict(const ManifoldSpec& spec,
                                        const std::vector<std::vector<double>>& points,
                                        double tol = kFlatConnectionTol) {
    if (points.empty()) throw SpecError("flatness_verdict: empty sample");
    FlatnessVerdict v;
    v.points = static_cast<int>(points.size());
    v.tol = tol;
    double sum = 0.0;
    for (const auto& p : points) {
        ConformalData cd = conformal_data(spec, p);
        double norm = cd.curvature.max_abs() / std::max(1.0, std::abs(cd.base.tau));
        sum += norm;
        v.max_normalized_curvature = std::max(v.max_normalized_curvature, norm);
        ConnectionRelations rel = relation_residuals(cd);
        v.max_lee_parallel = std::max(v.max_lee_parallel, rel.lee_parallel);
    }
    v.mean_normalized_curvature = sum / static_cast<double>(v.points);
    v.pass = v.max_normalized_curvature < tol;
    return v;
}

}  // namespace ccc
