#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ccc/diff.hpp"
#include "ccc/errors.hpp"
#include "ccc/jet.hpp"
#include "ccc/linalg.hpp"
#include "ccc/manifold.hpp"
#include "ccc/tensor.hpp"

namespace ccc {

// ============================================================================
// Chart geometry from jets of the metric
// ============================================================================
//
// Sign conventions, fixed here once:
//   R(e_i, e_j) e_k = R^l_{kij} e_l   with
//   R^l_{kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik},
// which realises R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z.
//   ρ_kj = R^i_{kij}            (positive on the round sphere)
//   τ    = g^{kj} ρ_kj
//   R_{lkij} = g_{lm} R^m_{kij}
// Δτ is the metric trace of the Hessian of τ (negative at a max of a bump).

/// Jets of the frame fields at one point: everything downstream is a finite
/// polynomial computation on these.
struct ChartJets {
    int dim = 0;
    int order = 0;
    std::vector<double> point;
    std::vector<Jet> g;      // g_ij jets, row-major
    std::vector<Jet> g_inv;  // g^ij jets
    std::vector<Jet> J;      // J^i_j jets

    const Jet& g_at(int i, int j) const { return g[linalg::at(dim, i, j)]; }
    const Jet& g_inv_at(int i, int j) const { return g_inv[linalg::at(dim, i, j)]; }
    const Jet& J_at(int i, int j) const { return J[linalg::at(dim, i, j)]; }
};

/// Jet-valued connection and curvature: Γ at order−1, R/ρ/τ at order−2.
struct CurvatureJets {
    int dim = 0;
    std::vector<Jet> Gamma;       // Γ^k_{ij}, layout [k][i][j]
    std::vector<Jet> Riemann_up;  // R^l_{kij}, layout [l][k][i][j]
    std::vector<Jet> Ricci;       // ρ_ij
    Jet tau;

    const Jet& Gamma_at(int k, int i, int j) const {
        return Gamma[(static_cast<std::size_t>(k) * dim + i) * dim + j];
    }
    const Jet& Riemann_at(int l, int k, int i, int j) const {
        return Riemann_up[((static_cast<std::size_t>(l) * dim + k) * dim + i) * dim + j];
    }
    const Jet& Ricci_at(int i, int j) const { return Ricci[linalg::at(dim, i, j)]; }
};

/// Pointwise curvature data extracted from the jets.
struct CurvatureBundle {
    int dim = 0;
    std::vector<double> point;
    std::vector<double> gamma;        // Γ^k_{ij}, [k][i][j]
    std::vector<double> riemann_up;   // R^l_{kij}, [l][k][i][j]
    std::vector<double> riemann_low;  // R_{lkij}
    std::vector<double> ricci;        // ρ_ij
    double tau = 0.0;
    std::vector<double> dtau;      // (dτ)_i = ∂_i τ
    std::vector<double> grad_tau;  // (grad τ)^i = g^{im} ∂_m τ
    std::vector<double> nabla_rho; // (∇_{e_k} ρ)(e_i, e_j), [k][i][j]
    double laplace_tau = 0.0;
    double ricci_norm_sq = 0.0;
    double dtau_norm_sq = 0.0;

    double gamma_at(int k, int i, int j) const {
        return gamma[(static_cast<std::size_t>(k) * dim + i) * dim + j];
    }
    double riemann_at(int l, int k, int i, int j) const {
        return riemann_up[((static_cast<std::size_t>(l) * dim + k) * dim + i) * dim + j];
    }
    double riemann_low_at(int l, int k, int i, int j) const {
        return riemann_low[((static_cast<std::size_t>(l) * dim + k) * dim + i) * dim + j];
    }
    double ricci_at(int i, int j) const { return ricci[linalg::at(dim, i, j)]; }
    double nabla_rho_at(int k, int i, int j) const {
        return nabla_rho[(static_cast<std::size_t>(k) * dim + i) * dim + j];
    }
};

/// Jets of the frame at `point`.  Orders above the public derivative cap are
/// permitted here: chart geometry consumes exact expression jets internally.
inline ChartJets chart_jets(const ManifoldSpec& spec, std::span<const double> point, int order) {
    if (order < 2) throw Error("chart_jets: order must be at least 2");
    // The frame constructor enforces the pointwise structural invariants
    // (symmetry, Hermitian property, conditioning) before any jets are built.
    MetricFrame frame = metric_frame(spec, point);

    ChartJets cj;
    cj.dim = spec.dim;
    cj.order = order;
    cj.point.assign(point.begin(), point.end());
    cj.g.reserve(spec.metric.size());
    for (const Expr& e : spec.metric) cj.g.push_back(detail::expr_jet_unchecked(e, point, order));
    cj.J.reserve(spec.complex_structure.size());
    for (const Expr& e : spec.complex_structure)
        cj.J.push_back(detail::expr_jet_unchecked(e, point, order));
    cj.g_inv = linalg::inverse<Jet>(spec.dim, cj.g, [&](double v) {
        return Jet::constant(v, spec.dim, order);
    });
    (void)frame;
    return cj;
}

/// Connection and curvature jets from frame jets.
inline CurvatureJets curvature_jets(const ChartJets& cj) {
    const int d = cj.dim;
    const int gamma_order = cj.order - 1;
    const int curv_order = cj.order - 2;
    if (curv_order < 0) throw Error("curvature_jets: need frame jets of order >= 2");

    // ∂_l g_ij as jets of order−1.
    std::vector<Jet> dg;
    dg.reserve(static_cast<std::size_t>(d) * d * d);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) dg.push_back(cj.g_at(i, j).derivative_jet(l));
    auto dg_at = [&](int l, int i, int j) -> const Jet& {
        return dg[(static_cast<std::size_t>(l) * d + i) * d + j];
    };

    CurvatureJets out;
    out.dim = d;
    out.tau = Jet::constant(0.0, d, curv_order);

    // Γ^k_{ij} = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    out.Gamma.reserve(static_cast<std::size_t>(d) * d * d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (j < i) {
                    out.Gamma.push_back(out.Gamma_at(k, j, i));  // symmetric in (i, j)
                    continue;
                }
                Jet acc = Jet::constant(0.0, d, gamma_order);
                for (int l = 0; l < d; ++l)
                    acc += cj.g_inv_at(k, l) * (dg_at(i, j, l) + dg_at(j, i, l) - dg_at(l, i, j));
                out.Gamma.push_back(acc * 0.5);
            }

    // R^l_{kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}
    out.Riemann_up.assign(static_cast<std::size_t>(d) * d * d * d,
                          Jet::constant(0.0, d, curv_order));
    auto riemann_slot = [&](int l, int k, int i, int j) -> Jet& {
        return out.Riemann_up[((static_cast<std::size_t>(l) * d + k) * d + i) * d + j];
    };
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    Jet acc = out.Gamma_at(l, j, k).derivative_jet(i) -
                              out.Gamma_at(l, i, k).derivative_jet(j);
                    for (int m = 0; m < d; ++m)
                        acc += out.Gamma_at(l, i, m) * out.Gamma_at(m, j, k) -
                               out.Gamma_at(l, j, m) * out.Gamma_at(m, i, k);
                    riemann_slot(l, k, i, j) = acc;
                    riemann_slot(l, k, j, i) = acc * -1.0;  // skew in (i, j) by construction
                }

    // ρ_kj = R^i_{kij};  τ = g^{kj} ρ_kj
    out.Ricci.assign(static_cast<std::size_t>(d) * d, Jet::constant(0.0, d, curv_order));
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            Jet acc = Jet::constant(0.0, d, curv_order);
            for (int i = 0; i < d; ++i) acc += out.Riemann_at(i, k, i, j);
            out.Ricci[linalg::at(d, k, j)] = acc;
            out.tau += cj.g_inv_at(k, j) * acc;
        }
    return out;
}

namespace detail {

inline void require_curvature_invariants(const CurvatureBundle& b) {
    const int d = b.dim;
    double rho_scale = std::max(1.0, linalg::max_abs(b.ricci));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(b.ricci_at(i, j) - b.ricci_at(j, i)) / rho_scale > 1e-10)
                throw SingularError("curvature: Ricci asymmetry beyond tolerance at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    double r_scale = std::max(1.0, linalg::max_abs(b.riemann_low));
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double a = b.riemann_low_at(l, k, i, j);
                    double c = b.riemann_low_at(i, j, l, k);
                    if (std::abs(a - c) / r_scale > 1e-9)
                        throw SingularError("curvature: pair-exchange symmetry violated");
                }
}

}  // namespace detail

/// Full pointwise curvature data (uses order-4 frame jets so that ∇ρ and Δτ
/// come from exact derivatives, not differencing).
inline CurvatureBundle curvature_bundle(const ManifoldSpec& spec, std::span<const double> point,
                                        int order = kMaxDerivativeOrder) {
    ChartJets cj = chart_jets(spec, point, order);
    CurvatureJets ct = curvature_jets(cj);
    const int d = cj.dim;

    CurvatureBundle b;
    b.dim = d;
    b.point = cj.point;

    b.gamma.resize(ct.Gamma.size());
    for (std::size_t i = 0; i < ct.Gamma.size(); ++i) b.gamma[i] = ct.Gamma[i].value();
    b.riemann_up.resize(ct.Riemann_up.size());
    for (std::size_t i = 0; i < ct.Riemann_up.size(); ++i)
        b.riemann_up[i] = ct.Riemann_up[i].value();
    b.ricci.resize(ct.Ricci.size());
    for (std::size_t i = 0; i < ct.Ricci.size(); ++i) b.ricci[i] = ct.Ricci[i].value();
    b.tau = ct.tau.value();

    // R_{lkij} = g_{lm} R^m_{kij}
    b.riemann_low.assign(b.riemann_up.size(), 0.0);
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double acc = 0.0;
                    for (int m = 0; m < d; ++m)
                        acc += cj.g_at(l, m).value() * b.riemann_at(m, k, i, j);
                    b.riemann_low[((static_cast<std::size_t>(l) * d + k) * d + i) * d + j] = acc;
                }

    // dτ, grad τ, ‖dτ‖²
    b.dtau.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) b.dtau[static_cast<std::size_t>(i)] = ct.tau.first(i);
    b.grad_tau.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int m = 0; m < d; ++m) acc += cj.g_inv_at(i, m).value() * b.dtau[static_cast<std::size_t>(m)];
        b.grad_tau[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < d; ++i)
        b.dtau_norm_sq += b.grad_tau[static_cast<std::size_t>(i)] * b.dtau[static_cast<std::size_t>(i)];

    // (∇_k ρ)_ij = ∂_k ρ_ij − Γ^m_{ki} ρ_mj − Γ^m_{kj} ρ_im
    b.nabla_rho.assign(static_cast<std::size_t>(d) * d * d, 0.0);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double acc = ct.Ricci_at(i, j).first(k);
                for (int m = 0; m < d; ++m)
                    acc -= b.gamma_at(m, k, i) * b.ricci_at(m, j) +
                           b.gamma_at(m, k, j) * b.ricci_at(i, m);
                b.nabla_rho[(static_cast<std::size_t>(k) * d + i) * d + j] = acc;
            }

    // Δτ = g^{ij} (∂_i ∂_j τ − Γ^m_{ij} ∂_m τ)
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            std::vector<int> alpha(static_cast<std::size_t>(d), 0);
            alpha[static_cast<std::size_t>(i)] += 1;
            alpha[static_cast<std::size_t>(j)] += 1;
            double hess = ct.tau.derivative(alpha);
            for (int m = 0; m < d; ++m)
                hess -= b.gamma_at(m, i, j) * b.dtau[static_cast<std::size_t>(m)];
            b.laplace_tau += cj.g_inv_at(i, j).value() * hess;
        }

    // ‖ρ‖² = ρ_ij ρ_kl g^{ik} g^{jl}
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double raised = 0.0;  // ρ^{ij}
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    raised += cj.g_inv_at(i, k).value() * cj.g_inv_at(j, l).value() *
                              b.ricci_at(k, l);
            b.ricci_norm_sq += raised * b.ricci_at(i, j);
        }

    detail::require_curvature_invariants(b);
    return b;
}

/// Γ^k_{ij} values only (layout [k][i][j]).
inline std::vector<double> christoffel(const ManifoldSpec& spec, std::span<const double> point) {
    ChartJets cj = chart_jets(spec, point, 2);
    CurvatureJets ct = curvature_jets(cj);
    std::vector<double> out(ct.Gamma.size());
    for (std::size_t i = 0; i < ct.Gamma.size(); ++i) out[i] = ct.Gamma[i].value();
    return out;
}

// ============================================================================
// Covariant differentiation of expression-backed tensor fields
// ============================================================================

/// A tensor field whose components are expressions in the chart coordinates,
/// so exact jets exist everywhere (the only kind of field the covariant
/// derivative accepts).
struct ExprTensorField {
    int dim = 0;
    std::vector<bool> upper;       // slot variance, as in TensorValue
    std::vector<Expr> components;  // row-major over dim^rank

    int rank() const { return static_cast<int>(upper.size()); }
};

/// ∇T at `point`: one new covariant slot in FRONT, (∇T)(e_k; …) = (∇_{e_k} T)(…).
///   (∇_k T)^{a…}_{b…} = ∂_k T^{a…}_{b…} + Σ_upper Γ^a_{km} T^{m…}_{b…}
///                                        − Σ_lower Γ^m_{kb} T^{a…}_{m…}
inline TensorValue covariant_derivative(const ExprTensorField& field,
                                        std::span<const double> point,
                                        const ManifoldSpec& spec) {
    const int d = field.dim;
    if (d != spec.dim) throw SpecError("covariant_derivative: field/spec dimension mismatch");
    const int r = field.rank();
    std::size_t comp_count = 1;
    for (int s = 0; s < r; ++s) comp_count *= static_cast<std::size_t>(d);
    if (field.components.size() != comp_count)
        throw SpecError("covariant_derivative: component count does not match valence");

    std::vector<double> gamma = christoffel(spec, point);
    auto gamma_at = [&](int k, int i, int j) {
        return gamma[(static_cast<std::size_t>(k) * d + i) * d + j];
    };

    // Values and first jets of every component.
    std::vector<Jet> jets;
    jets.reserve(comp_count);
    for (const Expr& e : field.components)
        jets.push_back(detail::expr_jet_unchecked(e, point, 1));

    std::vector<bool> upper(static_cast<std::size_t>(r) + 1, false);
    for (int s = 0; s < r; ++s) upper[static_cast<std::size_t>(s) + 1] = field.upper[static_cast<std::size_t>(s)];
    TensorValue out(d, upper, std::vector<double>(point.begin(), point.end()));

    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    for (std::size_t flat = 0; flat < comp_count; ++flat) {
        // decode row-major multi-index of the underlying field
        std::size_t rem = flat;
        for (int s = r - 1; s >= 0; --s) {
            idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
            rem /= static_cast<std::size_t>(d);
        }
        for (int k = 0; k < d; ++k) {
            double acc = jets[flat].first(k);
            for (int s = 0; s < r; ++s) {
                int is = idx[static_cast<std::size_t>(s)];
                // stride of slot s in the flat layout
                std::size_t stride = 1;
                for (int t = s + 1; t < r; ++t) stride *= static_cast<std::size_t>(d);
                std::size_t base = flat - static_cast<std::size_t>(is) * stride;
                if (field.upper[static_cast<std::size_t>(s)]) {
                    for (int m = 0; m < d; ++m)
                        acc += gamma_at(is, k, m) * jets[base + static_cast<std::size_t>(m) * stride].value();
                } else {
                    for (int m = 0; m < d; ++m)
                        acc -= gamma_at(m, k, is) * jets[base + static_cast<std::size_t>(m) * stride].value();
                }
            }
            std::size_t out_flat = static_cast<std::size_t>(k) * comp_count + flat;
            out.data()[out_flat] = acc;
        }
    }
    return out;
}

// ============================================================================
// Kähler-structure residuals
// ============================================================================

struct KahlerResiduals {
    double nabla_J_max = 0.0;    // max |(∇_i J)^k_j| over points and indices
    double hermitian_max = 0.0;  // max |(Jᵀ g J − g)_ij| / scale
    double dOmega_max = 0.0;     // max |(dΩ)_{ijk}| / scale
};

/// How far a spec is from being genuinely Kähler, over a set of sample
/// points: ∇J (parallel complex structure), JᵀgJ−g (Hermitian metric), and
/// dΩ (closed fundamental form).  All three vanish on a Kähler manifold.
inline KahlerResiduals kahler_residuals(const ManifoldSpec& spec,
                                        std::span<const std::vector<double>> points) {
    KahlerResiduals res;
    const int d = spec.dim;
    for (const std::vector<double>& p : points) {
        ChartJets cj = chart_jets(spec, p, 2);
        CurvatureJets ct = curvature_jets(cj);
        double gscale = 0.0;
        for (const Jet& e : cj.g) gscale = std::max(gscale, std::abs(e.value()));
        double scale = std::max(1.0, gscale);

        // (∇_i J)^k_j = ∂_i J^k_j + Γ^k_{im} J^m_j − Γ^m_{ij} J^k_m
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j) {
                    double acc = cj.J_at(k, j).first(i);
                    for (int m = 0; m < d; ++m)
                        acc += ct.Gamma_at(k, i, m).value() * cj.J_at(m, j).value() -
                               ct.Gamma_at(m, i, j).value() * cj.J_at(k, m).value();
                    res.nabla_J_max = std::max(res.nabla_J_max, std::abs(acc) / scale);
                }

        // Jᵀ g J − g
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double acc = -cj.g_at(i, j).value();
                for (int m = 0; m < d; ++m)
                    for (int l = 0; l < d; ++l)
                        acc += cj.J_at(m, i).value() * cj.g_at(m, l).value() *
                               cj.J_at(l, j).value();
                res.hermitian_max = std::max(res.hermitian_max, std::abs(acc) / scale);
            }

        // Ω_ij = J^m_i g_mj as first-order jets, then
        // (dΩ)_{ijk} = ∂_i Ω_jk + ∂_j Ω_ki + ∂_k Ω_ij
        std::vector<Jet> omega;
        omega.reserve(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet acc = Jet::constant(0.0, d, cj.order);
                for (int m = 0; m < d; ++m) acc += cj.J_at(m, i) * cj.g_at(m, j);
                omega.push_back(acc);
            }
        auto omega_at = [&](int i, int j) -> const Jet& { return omega[linalg::at(d, i, j)]; };
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (int k = j + 1; k < d; ++k) {
                    double acc = omega_at(j, k).first(i) + omega_at(k, i).first(j) +
                                 omega_at(i, j).first(k);
                    res.dOmega_max = std::max(res.dOmega_max, std::abs(acc) / scale);
                }
    }
    return res;
}

}  // namespace ccc
