#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccc/bochner.hpp"
#include "ccc/conformal.hpp"
#include "ccc/jet.hpp"
#include "ccc/levi_civita.hpp"
#include "ccc/manifold.hpp"
#include "ccc/parallel.hpp"
#include "ccc/tensor.hpp"

namespace ccc {

// ============================================================================
// Scalar distribution and theorem certification
// ============================================================================
//
// Where dτ ≠ 0, the unit field ξ = grad τ/‖dτ‖ and its covector η = g(ξ,·)
// split the tangent space into span{ξ, Jξ} and its orthogonal complement
// D_τ.  The distribution is of the special type certified here when
//
//   ∇_X ξ = (k/2){X − η(X)ξ + η(JX)Jξ} + p*·η(JX)Jξ,
//   dk = ξ(k)·η,     p* = −(ξ(k) + k²)/k,     k ≠ 0,
//
// for scalar fields k and p*.  Together with the curvature decomposition
//
//   R = a·π + b·Φ,   b ≠ 0,
//   4π(X,Y)Z = g(Y,Z)X − g(X,Z)Y − 2g(JX,Y)JZ + g(JY,Z)JX − g(JX,Z)JY,
//   8Φ(X,Y)Z = the analogous block built from η⊗η + (η∘J)⊗(η∘J),
//
// and the scalars a = τ/((n+1)(n+2)) + 2𝔟₀/(n+2),
// b = 2τ/((n+1)(n+2)) − 2n𝔟₀/(n+2), 𝔟₀ = (2a − b)/2, these data feed the
// two-directional certifier: a Kähler manifold admits a flat complex
// conformal connection iff it is Bochner-flat, its scalar distribution is
// of the above type, a + k² = 0, and the constants 𝔅 and 𝔟₀ vanish.
//
// Both π and Φ are instances of the shared Hermitian curvature-type
// correction: π = C[g/8] and Φ = C[(η⊗η + (η∘J)⊗(η∘J))/8].

/// Relative floor under which ‖dτ‖ counts as vanishing (the regime the
/// certified theorem excludes).
inline constexpr double kDegenerateScalarFloor = 1e-8;

/// Default tolerance for the certification verdicts.
inline constexpr double kTheoremTol = 1e-6;

/// Relative tolerance for classifying the sign of a + k².
inline constexpr double kSignClassTol = 1e-6;

// ----------------------------------------------------------------------------
// Scalar frame
// ----------------------------------------------------------------------------

/// The unit frame attached to the scalar curvature where dτ ≠ 0.
struct ScalarFrame {
    int dim = 0;
    std::vector<double> point;
    double tau = 0.0;
    double dtau_norm = 0.0;       // ‖dτ‖ > 0
    std::vector<double> xi;       // ξ^i = (grad τ)^i / ‖dτ‖
    std::vector<double> eta;      // η_i = (dτ)_i / ‖dτ‖
    std::vector<double> Jxi;      // (Jξ)^k
    std::vector<double> eta_J;    // (ηJ)_i = η(J e_i)
};

inline ScalarFrame scalar_frame(const CurvatureBundle& bundle, const MetricFrame& frame) {
    const int d = bundle.dim;
    const double norm = std::sqrt(std::max(0.0, bundle.dtau_norm_sq));
    if (norm <= kDegenerateScalarFloor * std::max(1.0, std::abs(bundle.tau)))
        throw DegenerateFieldError(
            "scalar curvature has vanishing differential here (|dtau| = " +
            detail::format_double(norm) + "); the scalar frame is undefined");
    ScalarFrame sf;
    sf.dim = d;
    sf.point = bundle.point;
    sf.tau = bundle.tau;
    sf.dtau_norm = norm;
    sf.xi.assign(static_cast<std::size_t>(d), 0.0);
    sf.eta.assign(static_cast<std::size_t>(d), 0.0);
    sf.Jxi.assign(static_cast<std::size_t>(d), 0.0);
    sf.eta_J.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        sf.xi[static_cast<std::size_t>(i)] = bundle.grad_tau[static_cast<std::size_t>(i)] / norm;
        sf.eta[static_cast<std::size_t>(i)] = bundle.dtau[static_cast<std::size_t>(i)] / norm;
    }
    for (int k = 0; k < d; ++k) {
        double jx = 0.0, ej = 0.0;
        for (int m = 0; m < d; ++m) {
            jx += frame.J_at(k, m) * sf.xi[static_cast<std::size_t>(m)];
            ej += sf.eta[static_cast<std::size_t>(m)] * frame.J_at(m, k);
        }
        sf.Jxi[static_cast<std::size_t>(k)] = jx;
        sf.eta_J[static_cast<std::size_t>(k)] = ej;
    }
    return sf;
}

inline ScalarFrame scalar_frame(const ManifoldSpec& spec, std::span<const double> point) {
    return scalar_frame(curvature_bundle(spec, point), metric_frame(spec, point));
}

// ----------------------------------------------------------------------------
// Distribution slope data
// ----------------------------------------------------------------------------

/// ∇ξ together with the extracted slopes k, p* and the residuals of the
/// distribution ansatz.  The slope k is read off as the average of
/// g(∇_{x}ξ, x) over the 2n−2 directions orthogonal to ξ and Jξ, and p*
/// from the Jξ-direction; k is then treated as a scalar field (via jets)
/// so that dk and ξ(k) are exact derivatives of the same quantity.
struct B0Data {
    ScalarFrame frame;
    TensorValue nabla_xi;         // (∇_i ξ)^k values, layout [k][i]
    double k = 0.0;
    double p_star = 0.0;
    double xi_k = 0.0;            // ξ(k)
    double ansatz_residual = 0.0;     // max |∇ξ − ansatz| over basis directions
    double dk_collinearity = 0.0;     // max |dk − ξ(k)η|
    double p_star_formula = 0.0;      // |p* + (ξ(k) + k²)/k|
};

inline B0Data b0_residuals(const ManifoldSpec& spec, std::span<const double> point) {
    MetricFrame frame = metric_frame(spec, point);
    const int d = frame.dim, n = d / 2;

    // The slope field k is differentiated once, so ∇ξ is needed to first
    // order, ξ to second, τ to third: frame jets of order five.  Orders
    // above the public derivative cap are deliberate internal use.
    ChartJets cj = chart_jets(spec, point, 5);
    CurvatureJets ct = curvature_jets(cj);
    const Jet& tau = ct.tau;  // order 3
    const double tau0 = tau.value();

    std::vector<Jet> dtau(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dtau[static_cast<std::size_t>(i)] = tau.derivative_jet(i);  // order 2

    auto at2 = [d](int i, int j) { return static_cast<std::size_t>(i) * d + j; };
    Jet norm2 = Jet::constant(0.0, d, 2);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            norm2 += cj.g_inv_at(i, j).truncated(2) * dtau[static_cast<std::size_t>(i)] *
                     dtau[static_cast<std::size_t>(j)];
    const double floor = kDegenerateScalarFloor * std::max(1.0, std::abs(tau0));
    if (!(norm2.value() > floor * floor))
        throw DegenerateFieldError(
            "scalar curvature has vanishing differential here (|dtau|^2 = " +
            detail::format_double(norm2.value()) + "); no distribution slope to extract");
    Jet ndt = sqrt(norm2);  // order 2

    std::vector<Jet> xi(static_cast<std::size_t>(d)), eta(static_cast<std::size_t>(d)),
        Jxi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        Jet gt = Jet::constant(0.0, d, 2);
        for (int m = 0; m < d; ++m)
            gt += cj.g_inv_at(i, m).truncated(2) * dtau[static_cast<std::size_t>(m)];
        xi[static_cast<std::size_t>(i)] = gt / ndt;
        eta[static_cast<std::size_t>(i)] = dtau[static_cast<std::size_t>(i)] / ndt;
    }
    for (int k = 0; k < d; ++k) {
        Jet jx = Jet::constant(0.0, d, 2);
        for (int m = 0; m < d; ++m)
            jx += cj.J_at(k, m).truncated(2) * xi[static_cast<std::size_t>(m)];
        Jxi[static_cast<std::size_t>(k)] = jx;
    }

    // (∇_i ξ)^k as order-1 jets.
    std::vector<Jet> nx(static_cast<std::size_t>(d) * d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) {
            Jet v = xi[static_cast<std::size_t>(k)].derivative_jet(i).truncated(1);
            for (int m = 0; m < d; ++m)
                v += ct.Gamma_at(k, i, m).truncated(1) * xi[static_cast<std::size_t>(m)].truncated(1);
            nx[at2(k, i)] = v;
        }

    // Slope field: k = (full trace − ξ- and Jξ-components)/(n−1).
    Jet trace = Jet::constant(0.0, d, 1);
    for (int i = 0; i < d; ++i) trace += nx[at2(i, i)];
    Jet along_xi = Jet::constant(0.0, d, 1);   // g(∇_ξ ξ, ξ)
    Jet along_jxi = Jet::constant(0.0, d, 1);  // g(∇_{Jξ} ξ, Jξ)
    std::vector<Jet> g_eta(static_cast<std::size_t>(d)), g_jxi(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        Jet ge = Jet::constant(0.0, d, 1);
        Jet gj = Jet::constant(0.0, d, 1);
        for (int m = 0; m < d; ++m) {
            ge += cj.g_at(k, m).truncated(1) * xi[static_cast<std::size_t>(m)].truncated(1);
            gj += cj.g_at(k, m).truncated(1) * Jxi[static_cast<std::size_t>(m)].truncated(1);
        }
        g_eta[static_cast<std::size_t>(k)] = ge;
        g_jxi[static_cast<std::size_t>(k)] = gj;
    }
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            along_xi += xi[static_cast<std::size_t>(i)].truncated(1) * nx[at2(k, i)] *
                        g_eta[static_cast<std::size_t>(k)];
            along_jxi += Jxi[static_cast<std::size_t>(i)].truncated(1) * nx[at2(k, i)] *
                         g_jxi[static_cast<std::size_t>(k)];
        }
    Jet k_field = (trace - along_xi - along_jxi) / static_cast<double>(n - 1);
    const double k_val = k_field.value();
    if (std::abs(k_val) < 1e-8 * std::max(1.0, std::sqrt(std::abs(tau0))))
        throw DegenerateFieldError("distribution slope k vanishes here (k = " +
                                   detail::format_double(k_val) + ")");
    const double p_star = -along_jxi.value();

    B0Data out{ScalarFrame{},
               TensorValue(d, {true, false}, std::vector<double>(point.begin(), point.end())),
               k_val,
               p_star,
               0.0,
               0.0,
               0.0,
               0.0};
    out.frame.dim = d;
    out.frame.point.assign(point.begin(), point.end());
    out.frame.tau = tau0;
    out.frame.dtau_norm = ndt.value();
    out.frame.xi.resize(static_cast<std::size_t>(d));
    out.frame.eta.resize(static_cast<std::size_t>(d));
    out.frame.Jxi.resize(static_cast<std::size_t>(d));
    out.frame.eta_J.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        out.frame.xi[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)].value();
        out.frame.eta[static_cast<std::size_t>(i)] = eta[static_cast<std::size_t>(i)].value();
        out.frame.Jxi[static_cast<std::size_t>(i)] = Jxi[static_cast<std::size_t>(i)].value();
    }
    for (int j = 0; j < d; ++j) {
        double ej = 0.0;
        for (int m = 0; m < d; ++m)
            ej += out.frame.eta[static_cast<std::size_t>(m)] * frame.J_at(m, j);
        out.frame.eta_J[static_cast<std::size_t>(j)] = ej;
    }
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) out.nabla_xi(k, i) = nx[at2(k, i)].value();

    // dk = ξ(k)·η and p* = −(ξ(k) + k²)/k.
    std::vector<double> dk(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dk[static_cast<std::size_t>(i)] = k_field.first(i);
    double xi_k = 0.0;
    for (int i = 0; i < d; ++i)
        xi_k += xi[static_cast<std::size_t>(i)].value() * dk[static_cast<std::size_t>(i)];
    out.xi_k = xi_k;
    for (int i = 0; i < d; ++i)
        out.dk_collinearity =
            std::max(out.dk_collinearity,
                     std::abs(dk[static_cast<std::size_t>(i)] -
                              xi_k * out.frame.eta[static_cast<std::size_t>(i)]));
    out.p_star_formula = std::abs(p_star + (xi_k + k_val * k_val) / k_val);

    // ∇_X ξ = (k/2){X − η(X)ξ + η(JX)Jξ} + p*·η(JX)Jξ over basis X.
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            double want = 0.5 * k_val * ((k == i ? 1.0 : 0.0) -
                                         out.frame.eta[static_cast<std::size_t>(i)] *
                                             out.frame.xi[static_cast<std::size_t>(k)] +
                                         out.frame.eta_J[static_cast<std::size_t>(i)] *
                                             out.frame.Jxi[static_cast<std::size_t>(k)]) +
                          p_star * out.frame.eta_J[static_cast<std::size_t>(i)] *
                              out.frame.Jxi[static_cast<std::size_t>(k)];
            out.ansatz_residual =
                std::max(out.ansatz_residual, std::abs(out.nabla_xi(k, i) - want));
        }
    return out;
}

// ----------------------------------------------------------------------------
// Curvature decomposition R = a·π + b·Φ
// ----------------------------------------------------------------------------

/// Least-squares coefficients of R against the π/Φ pair, with the
/// re-measured max-component residual (normalized by max(1, max|R|)).
struct DecompositionFit {
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;
    bool phi_used = true;  // false for the π-only fallback (constant τ)
};

namespace detail {

inline TensorValue pi_tensor(const MetricFrame& f) {
    const int d = f.dim;
    TensorValue g8(d, {false, false}, f.point);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g8(i, j) = f.g_at(i, j) / 8.0;
    return hermitian_correction(g8, f);
}

inline TensorValue phi_tensor(const MetricFrame& f, const ScalarFrame& sf) {
    const int d = f.dim;
    TensorValue m8(d, {false, false}, f.point);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m8(i, j) = (sf.eta[static_cast<std::size_t>(i)] * sf.eta[static_cast<std::size_t>(j)] +
                        sf.eta_J[static_cast<std::size_t>(i)] * sf.eta_J[static_cast<std::size_t>(j)]) /
                       8.0;
    return hermitian_correction(m8, f);
}

}  // namespace detail

inline DecompositionFit pi_phi_decomposition(const CurvatureBundle& bundle,
                                             const MetricFrame& frame) {
    const int d = bundle.dim;
    ScalarFrame sf = scalar_frame(bundle, frame);
    TensorValue pi = detail::pi_tensor(frame);
    TensorValue phi = detail::phi_tensor(frame, sf);

    double spp = 0.0, spf = 0.0, sff = 0.0, spr = 0.0, sfr = 0.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const double p = pi(l, k, i, j);
                    const double f = phi(l, k, i, j);
                    const double r = bundle.riemann_at(l, k, i, j);
                    spp += p * p;
                    spf += p * f;
                    sff += f * f;
                    spr += p * r;
                    sfr += f * r;
                }
    const double det = spp * sff - spf * spf;
    if (!(std::abs(det) > 1e-14 * std::max(1.0, spp * sff)))
        throw SingularError("curvature decomposition: the pi/phi normal equations are singular");
    DecompositionFit fit;
    fit.a = (spr * sff - sfr * spf) / det;
    fit.b = (sfr * spp - spr * spf) / det;

    double worst = 0.0, scale = 1.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const double r = bundle.riemann_at(l, k, i, j);
                    worst = std::max(worst, std::abs(r - fit.a * pi(l, k, i, j) -
                                                     fit.b * phi(l, k, i, j)));
                    scale = std::max(scale, std::abs(r));
                }
    fit.residual = worst / scale;
    return fit;
}

inline DecompositionFit pi_phi_decomposition(const ManifoldSpec& spec,
                                             std::span<const double> point) {
    return pi_phi_decomposition(curvature_bundle(spec, point), metric_frame(spec, point));
}

/// Fit against π alone — the fallback when τ is constant and no scalar
/// frame exists (e.g. complex space forms, where R = c·π exactly).
inline DecompositionFit pi_only_decomposition(const CurvatureBundle& bundle,
                                              const MetricFrame& frame) {
    const int d = bundle.dim;
    TensorValue pi = detail::pi_tensor(frame);
    double spp = 0.0, spr = 0.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    spp += pi(l, k, i, j) * pi(l, k, i, j);
                    spr += pi(l, k, i, j) * bundle.riemann_at(l, k, i, j);
                }
    DecompositionFit fit;
    fit.phi_used = false;
    fit.a = spr / spp;
    double worst = 0.0, scale = 1.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const double r = bundle.riemann_at(l, k, i, j);
                    worst = std::max(worst, std::abs(r - fit.a * pi(l, k, i, j)));
                    scale = std::max(scale, std::abs(r));
                }
    fit.residual = worst / scale;
    return fit;
}

inline DecompositionFit pi_only_decomposition(const ManifoldSpec& spec,
                                              std::span<const double> point) {
    return pi_only_decomposition(curvature_bundle(spec, point), metric_frame(spec, point));
}

// ----------------------------------------------------------------------------
// Geometric scalars a, b, 𝔟₀
// ----------------------------------------------------------------------------

struct GeometricFunctions {
    double a = 0.0;
    double b = 0.0;
    double frak_b0 = 0.0;
};

/// a, b from τ and a supplied 𝔟₀:
///   a = τ/((n+1)(n+2)) + 2𝔟₀/(n+2),  b = 2τ/((n+1)(n+2)) − 2n𝔟₀/(n+2).
/// Recomputing (2a − b)/2 returns 𝔟₀.
inline GeometricFunctions geometric_functions(const CurvatureBundle& bundle, double frak_b0) {
    const int n = bundle.dim / 2;
    GeometricFunctions gf;
    gf.frak_b0 = frak_b0;
    gf.a = bundle.tau / ((n + 1.0) * (n + 2.0)) + 2.0 * frak_b0 / (n + 2.0);
    gf.b = 2.0 * bundle.tau / ((n + 1.0) * (n + 2.0)) - 2.0 * n * frak_b0 / (n + 2.0);
    return gf;
}

/// a, b from the curvature decomposition fit, with 𝔟₀ = (2a − b)/2.
inline GeometricFunctions geometric_functions(const ManifoldSpec& spec,
                                              std::span<const double> point) {
    DecompositionFit fit = pi_phi_decomposition(spec, point);
    GeometricFunctions gf;
    gf.a = fit.a;
    gf.b = fit.b;
    gf.frak_b0 = (2.0 * fit.a - fit.b) / 2.0;
    return gf;
}

// ----------------------------------------------------------------------------
// Distribution summary at a point
// ----------------------------------------------------------------------------

enum class SignClass { negative, zero, positive };

inline const char* to_string(SignClass s) {
    switch (s) {
        case SignClass::negative: return "negative";
        case SignClass::zero: return "zero";
        case SignClass::positive: return "positive";
    }
    return "unknown";
}

struct DistributionData {
    ScalarFrame frame;
    double k = 0.0;
    double p_star = 0.0;
    double a = 0.0;
    double b = 0.0;
    double frak_b0 = 0.0;
    double a_plus_k2 = 0.0;
    SignClass cls = SignClass::zero;
};

inline DistributionData distribution_data(const ManifoldSpec& spec,
                                          std::span<const double> point,
                                          double class_tol = kSignClassTol) {
    B0Data b0 = b0_residuals(spec, point);
    DecompositionFit fit =
        pi_phi_decomposition(curvature_bundle(spec, point), metric_frame(spec, point));
    DistributionData dd;
    dd.frame = b0.frame;
    dd.k = b0.k;
    dd.p_star = b0.p_star;
    dd.a = fit.a;
    dd.b = fit.b;
    dd.frak_b0 = (2.0 * fit.a - fit.b) / 2.0;
    dd.a_plus_k2 = fit.a + b0.k * b0.k;
    const double gate = class_tol * std::max(1.0, std::abs(fit.a));
    dd.cls = std::abs(dd.a_plus_k2) <= gate
                 ? SignClass::zero
                 : (dd.a_plus_k2 > 0.0 ? SignClass::positive : SignClass::negative);
    return dd;
}

// ----------------------------------------------------------------------------
// Aggregation helpers
// ----------------------------------------------------------------------------

/// Max/mean of a nonnegative residual over sampled points.
struct ResidualSummary {
    double max = 0.0;
    double mean = 0.0;
    int points = 0;

    void add(double v) {
        max = std::max(max, v);
        mean = (mean * points + v) / (points + 1);
        ++points;
    }
};

/// Mean, spread, and extreme of a signed constant over sampled points,
/// with a scale for normalized reporting.
struct ConstantSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double max_abs = 0.0;
    double scale = 1.0;
    int points = 0;

    double mean_normalized() const { return std::abs(mean) / scale; }
    double spread_normalized() const { return stddev / scale; }
    double max_normalized() const { return max_abs / scale; }
};

namespace detail {

struct ConstantAccumulator {
    double sum = 0.0, sumsq = 0.0, max_abs = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        max_abs = std::max(max_abs, std::abs(v));
        ++n;
    }
    ConstantSummary finalize(double scale) const {
        ConstantSummary s;
        s.points = n;
        s.scale = std::max(1.0, scale);
        if (n > 0) {
            s.mean = sum / n;
            s.stddev = std::sqrt(std::max(0.0, sumsq / n - s.mean * s.mean));
            s.max_abs = max_abs;
        }
        return s;
    }
};

/// max|lhs − rhs| / max(1, max|lhs|, max|rhs|) over a component list.
struct GapMeter {
    double gap = 0.0, scale = 1.0;
    void add(double lhs, double rhs) {
        gap = std::max(gap, std::abs(lhs - rhs));
        scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
    }
    double normalized() const { return gap / scale; }
};

}  // namespace detail

// ----------------------------------------------------------------------------
// Forward certification
// ----------------------------------------------------------------------------

/// Per-equation residual record for the certified equivalence.  Every
/// residual is normalized by max(1, max|lhs|, max|rhs|) of the identity it
/// measures unless noted otherwise.
struct TheoremReport {
    int dim = 0;
    int n = 0;
    double tol = kTheoremTol;

    bool applicable = true;          // false: no sampled point admits the frame
    std::string not_applicable_reason;
    int points_total = 0;
    int points_used = 0;
    int points_degenerate = 0;       // dτ ≈ 0 or ω ≈ 0: excluded and reported
    int tau_sign_violations = 0;     // τ ≥ 0 where the chain requires τ < 0

    // Flat-connection side (measured at every point).
    ResidualSummary flat_curvature;       // max|ℛ| / max(1, |τ|)
    ResidualSummary lee_parallel;         // ∇ω + 2(ωJ)⊗(ωJ) + ω(P)g, / max(1, |τ|)
    ResidualSummary defining_complex_structure;  // 𝒟J, / max(1, |τ|)
    ResidualSummary defining_metric;      // 𝒟g + 2ω⊗g and the rescaled form, / max(1, |τ|)
    ResidualSummary defining_torsion;     // 𝒯 + 2Ω⊗JP and the rescaled form, / max(1, |τ|)
    ResidualSummary curvature_expansion;  // direct ℛ against its expansion in R, ω, P
    ResidualSummary reduced_curvature;    // ℛ = R + C[L] where the Lee form is parallel

    // Consequences of flatness, in derivation order.
    ResidualSummary ricci_from_lee;   // ρ = −2(n+2){ω⊗ω + ωJ⊗ωJ + ω(P)g}
    ResidualSummary ricci_lee_vector; // ρ(·,P) = −2(n+2)ω(P)ω
    ResidualSummary scalar_from_lee;  // τ = −4(n+1)(n+2)ω(P)
    ResidualSummary nabla_ricci;      // ∇ρ = 2(n+2)ω(P){2ω·g + sym + J-block}
    ResidualSummary lee_is_dtau;      // ω = −dτ/(2τ)
    ResidualSummary dtau_norm;        // ‖dτ‖² = −τ³/((n+1)(n+2))
    ResidualSummary nabla_xi;         // ∇ξ = (k/2){X − η(X)ξ − 2η(JX)Jξ}, k = −√(−τ/((n+1)(n+2)))
    ResidualSummary k_value;          // k = −√(−τ/((n+1)(n+2)))
    ResidualSummary p_star_value;     // p* = (3/2)√(−τ/((n+1)(n+2)))
    ResidualSummary a_value;          // a = τ/((n+1)(n+2))
    ResidualSummary b_value;          // b = 2τ/((n+1)(n+2))
    ResidualSummary decomposition;    // R = aπ + bΦ fit residual
    ResidualSummary laplace_tau;      // Δτ = −τ²/(n+1)
    ResidualSummary ricci_norm;       // ‖ρ‖² = (n+3)τ²/(2(n+1)²)

    // Constants of the characterization.
    ConstantSummary bochner_constant;  // ‖ρ‖² − τ²/(2(n+1)) + Δτ/(n+1), scale max(1, mean τ²)
    ConstantSummary b0_constant;       // (2a − b)/2, scale max(1, mean |τ|)
    ConstantSummary a_plus_k2;         // fit a + extracted k², scale max(1, mean |τ|)

    bool pass = false;

    std::vector<std::pair<std::string, const ResidualSummary*>> residual_items() const {
        return {{"flat_curvature", &flat_curvature},
                {"lee_parallel", &lee_parallel},
                {"defining_complex_structure", &defining_complex_structure},
                {"defining_metric", &defining_metric},
                {"defining_torsion", &defining_torsion},
                {"curvature_expansion", &curvature_expansion},
                {"reduced_curvature", &reduced_curvature},
                {"ricci_from_lee", &ricci_from_lee},
                {"ricci_lee_vector", &ricci_lee_vector},
                {"scalar_from_lee", &scalar_from_lee},
                {"nabla_ricci", &nabla_ricci},
                {"lee_is_dtau", &lee_is_dtau},
                {"dtau_norm", &dtau_norm},
                {"nabla_xi", &nabla_xi},
                {"k_value", &k_value},
                {"p_star_value", &p_star_value},
                {"a_value", &a_value},
                {"b_value", &b_value},
                {"decomposition", &decomposition},
                {"laplace_tau", &laplace_tau},
                {"ricci_norm", &ricci_norm}};
    }
    std::vector<std::pair<std::string, const ConstantSummary*>> constant_items() const {
        return {{"bochner_constant", &bochner_constant},
                {"b0_constant", &b0_constant},
                {"a_plus_k2", &a_plus_k2}};
    }
};

namespace detail {

/// Everything certify_forward measures at one point.  The connection-level
/// residuals (flatness, Lee-parallel) are always present; the theorem
/// chain is present only where the scalar frame exists (`chain`).
struct ForwardPoint {
    int dim = 0;
    double flat_curvature = 0.0;
    double lee_parallel = 0.0;
    double def_complex = 0.0, def_metric = 0.0, def_torsion = 0.0;
    double expansion = 0.0;
    double reduced = -1.0;  // < 0: Lee-parallel gate not met at this point
    bool chain = false;
    bool tau_nonneg = false;
    double r_ricci = 0.0, r_ricci_p = 0.0, r_scalar = 0.0, r_nabla_ricci = 0.0;
    double r_lee_dtau = 0.0, r_dtau_norm = 0.0, r_nabla_xi = 0.0, r_k = 0.0, r_pstar = 0.0;
    double r_a = 0.0, r_b = 0.0, r_fit = 0.0, r_laplace = 0.0, r_ricci_norm = 0.0;
    double frak_b = 0.0, frak_b0 = 0.0, a_plus_k2 = 0.0, abs_tau = 0.0, tau_sq = 0.0;
};

inline ForwardPoint forward_point(const ManifoldSpec& spec, const std::vector<double>& p) {
    ForwardPoint fp;
    ConformalData cd = conformal_data(spec, p);
    const CurvatureBundle& bu = cd.base;
    const MetricFrame& f = cd.frame;
    const LeeData& lee = cd.lee;
    const int d = cd.dim, n = d / 2;
    fp.dim = d;

    const double tau_scale = std::max(1.0, std::abs(bu.tau));
    fp.flat_curvature = cd.curvature.max_abs() / tau_scale;
    ConnectionRelations rel = relation_residuals(cd);
    fp.lee_parallel = rel.lee_parallel / tau_scale;
    fp.expansion = rel.curvature_identity;
    if (rel.reduced_identity) fp.reduced = *rel.reduced_identity;
    fp.def_complex = cd.defining.complex_structure / tau_scale;
    fp.def_metric = std::max(cd.defining.metric, cd.defining.metric_rescaled) / tau_scale;
    fp.def_torsion = std::max(cd.defining.torsion, cd.defining.torsion_rescaled) / tau_scale;

    const double ndt = std::sqrt(std::max(0.0, bu.dtau_norm_sq));
    const double dfloor = kDegenerateScalarFloor * tau_scale;
    if (ndt <= dfloor || lee.omega_P <= dfloor * dfloor) return fp;
    if (!(bu.tau < 0.0)) {
        fp.tau_nonneg = true;
        return fp;
    }
    fp.chain = true;

    const double c1 = (n + 1.0) * (n + 2.0);
    const double k_th = -std::sqrt(-bu.tau / c1);
    auto om = [&](int i) { return lee.omega[static_cast<std::size_t>(i)]; };
    auto omj = [&](int i) { return lee.omega_J[static_cast<std::size_t>(i)]; };

    GapMeter m_ricci, m_ricci_p, m_scalar, m_nr, m_ld, m_dn;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            m_ricci.add(bu.ricci_at(i, j),
                        -2.0 * (n + 2.0) *
                            (om(i) * om(j) + omj(i) * omj(j) + lee.omega_P * f.g_at(i, j)));
        }
        // Contracting the Ricci identity with P: ω(JP) = 0 and g(X,P) = ω(X),
        // so the two ω(P)ω(X) terms combine to −4(n+2).
        double rp = 0.0;
        for (int m = 0; m < d; ++m) rp += bu.ricci_at(i, m) * lee.P[static_cast<std::size_t>(m)];
        m_ricci_p.add(rp, -4.0 * (n + 2.0) * lee.omega_P * om(i));
        m_ld.add(om(i), -bu.dtau[static_cast<std::size_t>(i)] / (2.0 * bu.tau));
    }
    m_scalar.add(bu.tau, -4.0 * (n + 1.0) * (n + 2.0) * lee.omega_P);
    m_dn.add(bu.dtau_norm_sq, -std::pow(bu.tau, 3) / c1);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double rhs = 2.0 * (n + 2.0) * lee.omega_P *
                             (2.0 * om(k) * f.g_at(i, j) + om(i) * f.g_at(k, j) +
                              om(j) * f.g_at(k, i) + omj(i) * f.Omega_at(j, k) +
                              omj(j) * f.Omega_at(i, k));
                m_nr.add(bu.nabla_rho_at(k, i, j), rhs);
            }
    fp.r_ricci = m_ricci.normalized();
    fp.r_ricci_p = m_ricci_p.normalized();
    fp.r_scalar = m_scalar.normalized();
    fp.r_nabla_ricci = m_nr.normalized();
    fp.r_lee_dtau = m_ld.normalized();
    fp.r_dtau_norm = m_dn.normalized();

    B0Data b0 = b0_residuals(spec, p);
    GapMeter m_nx;
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) {
            double rhs = 0.5 * k_th *
                         ((k == i ? 1.0 : 0.0) -
                          b0.frame.eta[static_cast<std::size_t>(i)] *
                              b0.frame.xi[static_cast<std::size_t>(k)] -
                          2.0 * b0.frame.eta_J[static_cast<std::size_t>(i)] *
                              b0.frame.Jxi[static_cast<std::size_t>(k)]);
            m_nx.add(b0.nabla_xi(k, i), rhs);
        }
    fp.r_nabla_xi = m_nx.normalized();
    fp.r_k = std::abs(b0.k - k_th) / std::max(1.0, std::abs(k_th));
    fp.r_pstar = std::abs(b0.p_star + 1.5 * k_th) / std::max(1.0, std::abs(1.5 * k_th));

    DecompositionFit fit = pi_phi_decomposition(bu, f);
    const double a_th = bu.tau / c1;
    fp.r_a = std::abs(fit.a - a_th) / std::max(1.0, std::abs(a_th));
    fp.r_b = std::abs(fit.b - 2.0 * a_th) / std::max(1.0, std::abs(2.0 * a_th));
    fp.r_fit = fit.residual;

    GapMeter m_lap, m_rn;
    m_lap.add(bu.laplace_tau, -bu.tau * bu.tau / (n + 1.0));
    m_rn.add(bu.ricci_norm_sq, (n + 3.0) * bu.tau * bu.tau / (2.0 * (n + 1.0) * (n + 1.0)));
    fp.r_laplace = m_lap.normalized();
    fp.r_ricci_norm = m_rn.normalized();

    fp.frak_b = bochner_constant(bu);
    fp.frak_b0 = (2.0 * fit.a - fit.b) / 2.0;
    fp.a_plus_k2 = fit.a + b0.k * b0.k;
    fp.abs_tau = std::abs(bu.tau);
    fp.tau_sq = bu.tau * bu.tau;
    return fp;
}

}  // namespace detail

/// Certifies the forward direction on a sampled spec with potential: a flat
/// complex conformal connection forces the whole identity chain, the
/// distribution slopes, the curvature decomposition, and the vanishing of
/// the three constants.  Flatness and Lee-parallel residuals are measured
/// at every point; the chain only where the scalar frame exists.  Points
/// without the frame are excluded from the chain and reported; if none has
/// it, the theorem does not apply (`applicable` = false) and `pass` covers
/// the connection-level residuals alone.  Per-point work runs on `threads`
/// workers; the reduction is ordered, so results never depend on it.
inline TheoremReport certify_forward(const ManifoldSpec& spec,
                                     const std::vector<std::vector<double>>& points,
                                     double tol = kTheoremTol, int threads = 1) {
    if (points.empty()) throw SpecError("certify_forward: empty sample");
    if (!spec.has_potential())
        throw SpecError("certify_forward: spec '" + spec.name + "' carries no potential");

    std::vector<detail::ForwardPoint> fps(points.size());
    detail::parallel_for_index(points.size(), threads,
                               [&](std::size_t i) { fps[i] = detail::forward_point(spec, points[i]); });

    TheoremReport rep;
    rep.tol = tol;
    rep.points_total = static_cast<int>(points.size());
    detail::ConstantAccumulator acc_b, acc_b0, acc_ak2;
    double tau_abs_sum = 0.0, tau_sq_sum = 0.0;
    for (const auto& fp : fps) {
        rep.dim = fp.dim;
        rep.n = fp.dim / 2;
        rep.flat_curvature.add(fp.flat_curvature);
        rep.lee_parallel.add(fp.lee_parallel);
        rep.defining_complex_structure.add(fp.def_complex);
        rep.defining_metric.add(fp.def_metric);
        rep.defining_torsion.add(fp.def_torsion);
        rep.curvature_expansion.add(fp.expansion);
        if (fp.reduced >= 0.0) rep.reduced_curvature.add(fp.reduced);
        if (fp.tau_nonneg) {
            ++rep.tau_sign_violations;
            continue;
        }
        if (!fp.chain) {
            ++rep.points_degenerate;
            continue;
        }
        rep.ricci_from_lee.add(fp.r_ricci);
        rep.ricci_lee_vector.add(fp.r_ricci_p);
        rep.scalar_from_lee.add(fp.r_scalar);
        rep.nabla_ricci.add(fp.r_nabla_ricci);
        rep.lee_is_dtau.add(fp.r_lee_dtau);
        rep.dtau_norm.add(fp.r_dtau_norm);
        rep.nabla_xi.add(fp.r_nabla_xi);
        rep.k_value.add(fp.r_k);
        rep.p_star_value.add(fp.r_pstar);
        rep.a_value.add(fp.r_a);
        rep.b_value.add(fp.r_b);
        rep.decomposition.add(fp.r_fit);
        rep.laplace_tau.add(fp.r_laplace);
        rep.ricci_norm.add(fp.r_ricci_norm);
        acc_b.add(fp.frak_b);
        acc_b0.add(fp.frak_b0);
        acc_ak2.add(fp.a_plus_k2);
        tau_abs_sum += fp.abs_tau;
        tau_sq_sum += fp.tau_sq;
        ++rep.points_used;
    }

    if (rep.points_used == 0) {
        rep.applicable = false;
        rep.not_applicable_reason =
            "no sampled point carries the scalar frame (dtau or the Lee form vanishes "
            "everywhere sampled)";
    } else {
        rep.bochner_constant = acc_b.finalize(tau_sq_sum / rep.points_used);
        rep.b0_constant = acc_b0.finalize(tau_abs_sum / rep.points_used);
        rep.a_plus_k2 = acc_ak2.finalize(tau_abs_sum / rep.points_used);
    }

    bool ok = rep.tau_sign_violations == 0;
    for (const auto& [name, rs] : rep.residual_items()) ok = ok && rs->max < tol;
    if (rep.points_used > 0)
        for (const auto& [name, cs] : rep.constant_items())
            ok = ok && cs->mean_normalized() < tol && cs->spread_normalized() < tol &&
                 cs->max_normalized() < tol;
    rep.pass = ok;
    return rep;
}

// ----------------------------------------------------------------------------
// Inverse certification
// ----------------------------------------------------------------------------

struct PreconditionVerdict {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // the bound it was compared against
    std::string note;
};

/// Result of the inverse direction: hypothesis checks, the potential
/// u = −½ln(−τ) constructed from τ-jets, and the flatness of the induced
/// connection.
struct InverseReport {
    int dim = 0;
    int n = 0;
    double tol = kTheoremTol;

    std::vector<PreconditionVerdict> preconditions;
    bool preconditions_pass = false;

    int points_total = 0;
    int points_used = 0;

    std::vector<double> constructed_u;  // u at each used point, in sample order
    ResidualSummary flat_curvature;     // max|ℛ| / max(1, |τ|) with the constructed u
    ResidualSummary nabla_eta;          // ∇η vs the slope expression from the hypothesis
    ResidualSummary k_consistency;      // k = −√(−τ/((n+1)(n+2)))
    ResidualSummary xi_tau;             // ξ(τ) = (n+1)(n+2)·k·b/2 (> 0)

    bool pass = false;

    const PreconditionVerdict* find(const std::string& name) const {
        for (const auto& v : preconditions)
            if (v.name == name) return &v;
        return nullptr;
    }
};

namespace detail {

struct InversePrePoint {
    double tau = 0.0;
    double reg = 0.0;  // ‖dτ‖ / max(1, |τ|)
    bool frame_ok = false;
    double b0_worst = 0.0, ak2 = 0.0, frak_b0 = 0.0;
};

inline InversePrePoint inverse_pre_point(const ManifoldSpec& spec, const std::vector<double>& p) {
    InversePrePoint pre;
    CurvatureBundle bu = curvature_bundle(spec, p);
    pre.tau = bu.tau;
    pre.reg = std::sqrt(std::max(0.0, bu.dtau_norm_sq)) / std::max(1.0, std::abs(bu.tau));
    if (pre.reg <= kDegenerateScalarFloor) return pre;
    pre.frame_ok = true;
    B0Data b0 = b0_residuals(spec, p);
    DecompositionFit fit = pi_phi_decomposition(bu, metric_frame(spec, p));
    const double kscale = std::max(1.0, std::abs(b0.k));
    pre.b0_worst = std::max({b0.ansatz_residual / kscale, b0.dk_collinearity / kscale,
                             b0.p_star_formula / kscale});
    pre.ak2 = std::abs(fit.a + b0.k * b0.k) / std::max(1.0, std::abs(fit.a));
    pre.frak_b0 = std::abs((2.0 * fit.a - fit.b) / 2.0) / std::max(1.0, std::abs(bu.tau));
    return pre;
}

struct InverseConPoint {
    double u = 0.0;
    double flat = 0.0, nabla_eta = 0.0, k_cons = 0.0, xi_tau = 0.0;
};

inline InverseConPoint inverse_con_point(const ManifoldSpec& spec, const std::vector<double>& p) {
    InverseConPoint con;
    ChartJets cj = chart_jets(spec, p, 4);
    CurvatureJets ct = curvature_jets(cj);
    Jet u_jet = ln(-ct.tau) * (-0.5);  // order 2
    ConformalData cd = conformal_data(spec, p, u_jet);
    con.u = u_jet.value();
    con.flat = cd.curvature.max_abs() / std::max(1.0, std::abs(cd.base.tau));

    const int d = cd.dim, n = d / 2;
    const double c1 = (n + 1.0) * (n + 2.0);
    const double k_th = -std::sqrt(-cd.base.tau / c1);
    B0Data b0 = b0_residuals(spec, p);
    con.k_cons = std::abs(b0.k - k_th) / std::max(1.0, std::abs(k_th));

    // (∇_i η)_j against the slope expression.
    GapMeter meta;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double ne = 0.0;
            for (int m = 0; m < d; ++m) ne += cd.frame.g_at(j, m) * b0.nabla_xi(m, i);
            double rhs = 0.5 * k_th *
                         (cd.frame.g_at(i, j) -
                          b0.frame.eta[static_cast<std::size_t>(i)] *
                              b0.frame.eta[static_cast<std::size_t>(j)] +
                          2.0 * b0.frame.eta_J[static_cast<std::size_t>(i)] *
                              b0.frame.eta_J[static_cast<std::size_t>(j)]);
            meta.add(ne, rhs);
        }
    con.nabla_eta = meta.normalized();

    // ξ(τ) = ‖dτ‖ must equal (n+1)(n+2)·k·b/2 and be positive.
    DecompositionFit fit = pi_phi_decomposition(cd.base, cd.frame);
    GapMeter mxt;
    mxt.add(b0.frame.dtau_norm, c1 * b0.k * fit.b / 2.0);
    con.xi_tau = mxt.normalized();
    return con;
}

}  // namespace detail

/// Certifies the inverse direction on a spec WITHOUT a potential: checks
/// the hypotheses (Bochner-flat, distribution ansatz, a + k² = 0, 𝔟₀ = 0,
/// τ < 0), then constructs u = −½ln(−τ) from τ-jets by exact chain rule
/// and certifies the induced connection flat.  Per-point work runs on
/// `threads` workers; the reduction is ordered, so results never depend
/// on it.
inline InverseReport certify_inverse(const ManifoldSpec& spec,
                                     const std::vector<std::vector<double>>& points,
                                     double tol = kTheoremTol, int threads = 1) {
    if (points.empty()) throw SpecError("certify_inverse: empty sample");
    if (spec.has_potential())
        throw SpecError("certify_inverse: spec '" + spec.name +
                        "' already carries a potential; strip it so the certifier "
                        "constructs its own");

    InverseReport rep;
    rep.tol = tol;
    rep.points_total = static_cast<int>(points.size());
    rep.dim = spec.dim;
    rep.n = spec.n();

    // --- Hypothesis checks over the sample -----------------------------------
    ResidualStats bochner = bochner_flat_residual(spec, points);
    rep.preconditions.push_back({"bochner_flat", bochner.pass, bochner.max_residual,
                                 bochner.tol, "normalized trace-free curvature"});

    std::vector<detail::InversePrePoint> pres(points.size());
    detail::parallel_for_index(points.size(), threads, [&](std::size_t i) {
        pres[i] = detail::inverse_pre_point(spec, points[i]);
    });
    double min_reg = std::numeric_limits<double>::infinity();
    double max_tau = -std::numeric_limits<double>::infinity();
    double worst_b0 = 0.0, worst_ak2 = 0.0, worst_frak_b0 = 0.0;
    bool frame_ok = true;
    for (const auto& pre : pres) {
        min_reg = std::min(min_reg, pre.reg);
        max_tau = std::max(max_tau, pre.tau);
        frame_ok = frame_ok && pre.frame_ok;
        worst_b0 = std::max(worst_b0, pre.b0_worst);
        worst_ak2 = std::max(worst_ak2, pre.ak2);
        worst_frak_b0 = std::max(worst_frak_b0, pre.frak_b0);
    }
    rep.preconditions.push_back({"scalar_field_regular", frame_ok, min_reg,
                                 kDegenerateScalarFloor,
                                 frame_ok ? "" : "dtau vanishes at a sampled point"});
    rep.preconditions.push_back({"b0_distribution", frame_ok && worst_b0 < tol, worst_b0, tol,
                                 "slope ansatz, dk collinearity, p* formula"});
    rep.preconditions.push_back({"a_plus_k2_zero", frame_ok && worst_ak2 < tol, worst_ak2, tol,
                                 "decomposition a against extracted k"});
    rep.preconditions.push_back({"b0_constant_zero", frame_ok && worst_frak_b0 < tol,
                                 worst_frak_b0, tol, "(2a - b)/2 normalized by |tau|"});
    rep.preconditions.push_back({"tau_negative", max_tau < 0.0, max_tau, 0.0,
                                 "largest sampled scalar curvature"});

    rep.preconditions_pass = true;
    for (const auto& v : rep.preconditions) rep.preconditions_pass = rep.preconditions_pass && v.pass;
    if (!rep.preconditions_pass) {
        rep.pass = false;
        return rep;
    }

    // --- Construction: u = −½ ln(−τ) from τ-jets ----------------------------
    std::vector<detail::InverseConPoint> cons(points.size());
    detail::parallel_for_index(points.size(), threads, [&](std::size_t i) {
        cons[i] = detail::inverse_con_point(spec, points[i]);
    });
    for (const auto& con : cons) {
        rep.constructed_u.push_back(con.u);
        rep.flat_curvature.add(con.flat);
        rep.nabla_eta.add(con.nabla_eta);
        rep.k_consistency.add(con.k_cons);
        rep.xi_tau.add(con.xi_tau);
        ++rep.points_used;
    }

    rep.pass = rep.flat_curvature.max < tol && rep.nabla_eta.max < tol &&
               rep.k_consistency.max < tol && rep.xi_tau.max < tol;
    return rep;
}

}  // namespace ccc
