#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ccc/manifold.hpp"

namespace ccc {

// ============================================================================
// Built-in models
// ============================================================================
//
//   flat           — ℂⁿ with the identity metric and the standard J.
//   space_form     — constant holomorphic sectional curvature c ≠ 0, from the
//                    Kähler potential F(z) = (4/c)·ln(1 + (c/4)|z|²) expanded
//                    into real coordinates (g = I at the chart origin).
//   warped_type9   — the 2n-dimensional warped product over the Sasakian
//                    space form ℝ^{2n-1}(−3): profile p(t) = (1−3(t−t₀))^(−1/3),
//                    metric p⁴·dt⊗dt + p²·¼Σ(dxᵢ²+dyᵢ²) + p⁶·η̃₀⊗η̃₀ with
//                    η̃₀ = ½(dz − Σyᵢdxᵢ); equivalently p²{g₀ + (p′−1)η̃₀⊗η̃₀}
//                    + η⊗η with p′ = p⁴ and η = p²dt the unit covector of the
//                    t-line (t is not arclength). Carries the matching scalar
//                    potential u = −½ln(−τ), τ = −4(n+1)(n+2)p².
//   perturbed_flat — a conformal perturbation of flat space: Hermitian and
//                    positive definite (validation passes) but not Kähler;
//                    the standing negative control.
//
// Coordinates are ordered (x1, y1, ..., xn, yn) for the complex models and
// (t, x1, y1, ..., x_{n-1}, y_{n-1}, z) for the warped product.

/// The empirically resolved orientation of J on ∂t for warped_type9: with
/// the coordinate conventions above (φ∂yᵢ = ∂xᵢ + yᵢ∂z on the contact
/// distribution), the ∇J = 0 test passes for exactly one sign, and this is
/// it (the kahler-residual unit test pins it).
inline constexpr double kWarpedSigma = -1.0;

struct ModelParamDoc {
    std::string name;
    double default_value;
    std::string doc;
};

struct ModelInfo {
    std::string name;
    std::string summary;
    std::vector<ModelParamDoc> params;
};

inline std::vector<ModelInfo> model_catalog() {
    return {
        {"flat",
         "flat complex space: identity metric, standard complex structure, zero curvature",
         {{"n", 3.0, "complex dimension (chart dimension 2n)"}}},
        {"space_form",
         "constant holomorphic sectional curvature c from a logarithmic potential",
         {{"n", 3.0, "complex dimension"},
          {"c", -4.0, "holomorphic sectional curvature, c != 0; chart radius |z|^2 < 4/|c| for c < 0"}}},
        {"warped_type9",
         "warped product over the Sasakian space form R^(2n-1)(-3) with profile (1 - 3(t - t0))^(-1/3)",
         {{"n", 3.0, "complex dimension (base dimension 2n-1)"},
          {"t0", 0.0, "profile origin; chart requires t < t0 + 1/3"},
          {"sigma", kWarpedSigma, "orientation of J on the t-direction; only the default is parallel (Kahler)"}}},
        {"perturbed_flat",
         "conformally perturbed flat space: passes structural validation, fails the Kahler and curvature certificates",
         {{"n", 3.0, "complex dimension"},
          {"eps", 0.2, "perturbation amplitude, |eps| < 1"}}},
    };
}

namespace detail {

using linalg::at;

inline double model_param(const std::map<std::string, double>& params,
                          const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

inline int model_param_int(const std::map<std::string, double>& params,
                           const std::string& key, int fallback) {
    double v = model_param(params, key, static_cast<double>(fallback));
    int i = static_cast<int>(std::lround(v));
    if (static_cast<double>(i) != v)
        throw SpecError("parameter '" + key + "' must be an integer");
    return i;
}

inline void reject_unknown_params(const std::map<std::string, double>& params,
                                  std::initializer_list<const char*> known) {
    for (const auto& [k, _] : params) {
        bool ok = false;
        for (const char* name : known)
            if (k == name) ok = true;
        if (!ok) throw SpecError("unknown model parameter '" + k + "'");
    }
}

/// Row-major matrix of "0" strings.
inline std::vector<std::string> zero_matrix(int dim) {
    return std::vector<std::string>(
        static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), "0");
}

inline void standard_complex_structure(int n, std::vector<std::string>& J) {
    const int dim = 2 * n;
    for (int k = 0; k < n; ++k) {
        const int x = 2 * k, y = 2 * k + 1;
        J[linalg::at(dim, y, x)] = "1";   // J ∂x_k = ∂y_k
        J[linalg::at(dim, x, y)] = "-1";  // J ∂y_k = -∂x_k
    }
}

inline nlohmann::json box_domain(const std::vector<std::string>& coords,
                                 const std::vector<std::pair<double, double>>& box) {
    nlohmann::json dom = nlohmann::json::object();
    for (std::size_t i = 0; i < coords.size(); ++i)
        dom[coords[i]] = nlohmann::json::array({box[i].first, box[i].second});
    return dom;
}

inline nlohmann::json spec_document(const std::string& name, int dim,
                                    const std::vector<std::string>& coords,
                                    const std::map<std::string, double>& params,
                                    const std::vector<std::string>& g,
                                    const std::vector<std::string>& J,
                                    const nlohmann::json& potential,
                                    const nlohmann::json& domain) {
    auto matrix = [dim](const std::vector<std::string>& flat) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < dim; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < dim; ++j) row.push_back(flat[linalg::at(dim, i, j)]);
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json doc;
    doc["name"] = name;
    doc["dim"] = dim;
    doc["coordinates"] = coords;
    doc["params"] = params.empty() ? nlohmann::json::object() : nlohmann::json(params);
    doc["metric"] = matrix(g);
    doc["complex_structure"] = matrix(J);
    doc["potential_u"] = potential;
    doc["domain"] = domain;
    return doc;
}

inline std::vector<std::string> complex_coords(int n) {
    std::vector<std::string> coords;
    for (int k = 1; k <= n; ++k) {
        coords.push_back("x" + std::to_string(k));
        coords.push_back("y" + std::to_string(k));
    }
    return coords;
}

// ---- flat -------------------------------------------------------------------

inline ManifoldSpec model_flat(const std::map<std::string, double>& params) {
    reject_unknown_params(params, {"n"});
    const int n = model_param_int(params, "n", 3);
    if (n < 2) throw SpecError("flat: n must be at least 2");
    const int dim = 2 * n;
    auto coords = complex_coords(n);
    auto g = zero_matrix(dim);
    for (int i = 0; i < dim; ++i) g[linalg::at(dim, i, i)] = "1";
    auto J = zero_matrix(dim);
    standard_complex_structure(n, J);
    std::vector<std::pair<double, double>> box(static_cast<std::size_t>(dim), {-1.0, 1.0});
    return manifold_spec_from_json(spec_document("flat", dim, coords, {}, g, J,
                                             nlohmann::json(nullptr),
                                             box_domain(coords, box)));
}

// ---- space form ---------------------------------------------------------------

inline ManifoldSpec model_space_form(const std::map<std::string, double>& params) {
    reject_unknown_params(params, {"n", "c"});
    const int n = model_param_int(params, "n", 3);
    const double c = model_param(params, "c", -4.0);
    if (n < 2) throw SpecError("space_form: n must be at least 2");
    if (c == 0.0) throw SpecError("space_form: c must be nonzero (use flat for c = 0)");
    const int dim = 2 * n;
    auto coords = complex_coords(n);

    // w = 1 + (c/4)|z|²; the Hermitian components of the potential's metric are
    //   g_{j k̄} = δ_jk / w − (c/4) z̄_j z_k / w²
    // whose real and imaginary parts fill the real 2n×2n matrix below.
    std::string S;
    for (int k = 1; k <= n; ++k) {
        if (!S.empty()) S += " + ";
        S += "x" + std::to_string(k) + "^2 + y" + std::to_string(k) + "^2";
    }
    const std::string W = "(1 + (c/4)*(" + S + "))";
    const std::string W2 = W + "^2";

    auto g = zero_matrix(dim);
    for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k) {
            const std::string xj = "x" + std::to_string(j), yj = "y" + std::to_string(j);
            const std::string xk = "x" + std::to_string(k), yk = "y" + std::to_string(k);
            const int jx = 2 * (j - 1), jy = jx + 1;
            const int kx = 2 * (k - 1), ky = kx + 1;
            // Re g_{j k̄}: shared by the xx and yy blocks
            std::string re = (j == k)
                ? "1/" + W + " - (c/4)*(" + xj + "*" + xk + " + " + yj + "*" + yk + ")/" + W2
                : "-(c/4)*(" + xj + "*" + xk + " + " + yj + "*" + yk + ")/" + W2;
            g[at(dim, jx, kx)] = re;
            g[at(dim, jy, ky)] = re;
            // Im g_{j k̄}: the xy block (zero on the diagonal)
            if (j != k) {
                std::string im = "-(c/4)*(" + xj + "*" + yk + " - " + yj + "*" + xk + ")/" + W2;
                std::string im_t = "-(c/4)*(" + xk + "*" + yj + " - " + yk + "*" + xj + ")/" + W2;
                g[at(dim, jx, ky)] = im;
                g[at(dim, ky, jx)] = im;
                g[at(dim, jy, kx)] = im_t;
                g[at(dim, kx, jy)] = im_t;
            }
        }

    auto J = zero_matrix(dim);
    standard_complex_structure(n, J);

    // Stay well inside the chart: for c < 0 the potential degenerates at
    // |z|² = 4/|c|, so take a box with Σ (half-width)² ≤ 0.75 · (4/|c|).
    double half = (c < 0.0) ? 0.35 * 2.0 / std::sqrt(-c) : 0.5;
    std::vector<std::pair<double, double>> box(static_cast<std::size_t>(dim), {-half, half});

    return manifold_spec_from_json(spec_document("space_form", dim, coords, {{"c", c}},
                                             g, J, nlohmann::json(nullptr),
                                             box_domain(coords, box)));
}

// ---- warped product over the Sasakian space form ------------------------------

inline ManifoldSpec model_warped_type9(const std::map<std::string, double>& params) {
    reject_unknown_params(params, {"n", "t0", "sigma"});
    const int n = model_param_int(params, "n", 3);
    const double t0 = model_param(params, "t0", 0.0);
    const double sigma = model_param(params, "sigma", kWarpedSigma);
    if (n < 2) throw SpecError("warped_type9: n must be at least 2");
    if (sigma != 1.0 && sigma != -1.0)
        throw SpecError("warped_type9: sigma must be +1 or -1");
    const int m = n - 1;  // base contact pairs
    const int dim = 2 * n;

    std::vector<std::string> coords;
    coords.push_back("t");
    for (int i = 1; i <= m; ++i) {
        coords.push_back("x" + std::to_string(i));
        coords.push_back("y" + std::to_string(i));
    }
    coords.push_back("z");
    auto cx = [](int i) { return 1 + 2 * (i - 1); };  // x_i column
    auto cy = [](int i) { return 2 + 2 * (i - 1); };  // y_i column
    const int ct = 0, cz = dim - 1;

    // p(t) = (1 - 3(t - t0))^(-1/3); the metric uses p², p⁴ = p′ and
    // p⁶ = p²·p′, with the profile identity p′ = p⁴ already substituted:
    //   g = p⁴·dt⊗dt + p²·¼Σ(dxᵢ² + dyᵢ²) + p⁶·η̃₀⊗η̃₀,
    //   η̃₀ = ½(dz − Σ yᵢ dxᵢ).
    // The dt⊗dt coefficient p⁴ (= 1 at t = t₀) is forced by closedness of
    // the fundamental form: with the η̃₀ coefficient p²p′, dΩ = 0 requires
    // (p²)′ = 2·√(g_tt)·√(p²p′), i.e. g_tt = p′.
    const std::string A = "(1 - 3*(t - t0))";
    const std::string P2 = A + "^(-2/3)";
    const std::string P4 = A + "^(-4/3)";
    const std::string P6 = A + "^(-2)";

    auto g = zero_matrix(dim);
    g[at(dim, ct, ct)] = P4;
    g[at(dim, cz, cz)] = P6 + "/4";
    for (int i = 1; i <= m; ++i) {
        const std::string yi = "y" + std::to_string(i);
        g[at(dim, cy(i), cy(i))] = P2 + "/4";
        g[at(dim, cx(i), cx(i))] = P2 + "/4 + " + P6 + "*" + yi + "^2/4";
        const std::string cross = "-" + P6 + "*" + yi + "/4";
        g[at(dim, cx(i), cz)] = cross;
        g[at(dim, cz, cx(i))] = cross;
        for (int j = i + 1; j <= m; ++j) {
            const std::string yj = "y" + std::to_string(j);
            const std::string mixed = P6 + "*" + yi + "*" + yj + "/4";
            g[at(dim, cx(i), cx(j))] = mixed;
            g[at(dim, cx(j), cx(i))] = mixed;
        }
    }

    // J = φ on the contact distribution, J∂t = σ p^(−1) ξ̃₀ with ξ̃₀ = 2∂z
    // (the p^(−1) scale makes J∂t have length √(g_tt) = p²):
    //   J∂t   = 2σ(1−3(t−t₀))^(1/3) ∂z
    //   J∂xᵢ  = (σ/2) yᵢ (1−3(t−t₀))^(−1/3) ∂t − ∂yᵢ
    //   J∂yᵢ  = ∂xᵢ + yᵢ ∂z
    //   J∂z   = −(σ/2)(1−3(t−t₀))^(−1/3) ∂t
    auto J = zero_matrix(dim);
    J[at(dim, cz, ct)] = "2*sigma*" + A + "^(1/3)";
    J[at(dim, ct, cz)] = "-(sigma/2)*" + A + "^(-1/3)";
    for (int i = 1; i <= m; ++i) {
        const std::string yi = "y" + std::to_string(i);
        J[at(dim, ct, cx(i))] = "(sigma/2)*" + yi + "*" + A + "^(-1/3)";
        J[at(dim, cy(i), cx(i))] = "-1";
        J[at(dim, cx(i), cy(i))] = "1";
        J[at(dim, cz, cy(i))] = yi;
    }

    // Scalar potential matching the scalar curvature τ = −4(n+1)(n+2) p²
    // through 2u = −ln(−τ):  u = ⅓ ln(1 − 3(t − t₀)) − ½ ln(4(n+1)(n+2)).
    const double tau_scale = 4.0 * (n + 1) * (n + 2);
    const std::string u =
        "ln(1 - 3*(t - t0))/3 - 0.5*ln(" + format_double(tau_scale) + ")";

    std::vector<std::pair<double, double>> box;
    box.emplace_back(t0 - 2.0, t0 + 1.0 / 3.0 - 0.05);
    for (int i = 0; i < dim - 2; ++i) box.emplace_back(-1.0, 1.0);
    box.emplace_back(-1.0, 1.0);  // z

    return manifold_spec_from_json(spec_document("warped_type9", dim, coords,
                                             {{"t0", t0}, {"sigma", sigma}}, g, J,
                                             nlohmann::json(u),
                                             box_domain(coords, box)));
}

// ---- perturbed flat ------------------------------------------------------------

inline ManifoldSpec model_perturbed_flat(const std::map<std::string, double>& params) {
    reject_unknown_params(params, {"n", "eps"});
    const int n = model_param_int(params, "n", 3);
    const double eps = model_param(params, "eps", 0.2);
    if (n < 2) throw SpecError("perturbed_flat: n must be at least 2");
    if (!(std::abs(eps) < 1.0))
        throw SpecError("perturbed_flat: |eps| must be below 1 to keep the metric positive");
    const int dim = 2 * n;
    auto coords = complex_coords(n);
    auto g = zero_matrix(dim);
    for (int i = 0; i < dim; ++i)
        g[linalg::at(dim, i, i)] = "1 + eps*sin(x1)*cos(y2)";
    auto J = zero_matrix(dim);
    standard_complex_structure(n, J);
    std::vector<std::pair<double, double>> box(static_cast<std::size_t>(dim), {-1.0, 1.0});
    return manifold_spec_from_json(spec_document("perturbed_flat", dim, coords,
                                             {{"eps", eps}}, g, J,
                                             nlohmann::json(nullptr),
                                             box_domain(coords, box)));
}

}  // namespace detail

inline ManifoldSpec builtin_model(const std::string& name,
                                  const std::map<std::string, double>& params = {}) {
    if (name == "flat") return detail::model_flat(params);
    if (name == "space_form") return detail::model_space_form(params);
    if (name == "warped_type9") return detail::model_warped_type9(params);
    if (name == "perturbed_flat") return detail::model_perturbed_flat(params);
    throw SpecError("unknown model '" + name +
                    "' (known: flat, space_form, warped_type9, perturbed_flat)");
}

/// Uniform deterministic samples in the spec's declared box. The generator
/// maps raw 64-bit draws to [0,1) as (x >> 11)·2⁻⁵³, so the sequence is
/// identical across platforms for a fixed seed.
inline std::vector<std::vector<double>> sample_points(const ManifoldSpec& spec,
                                                      int count, std::uint64_t seed) {
    if (count < 1) throw SpecError("sample count must be at least 1");
    for (int c = 0; c < spec.dim; ++c) {
        const auto& iv = spec.domain[static_cast<std::size_t>(c)];
        if (!iv.lo || !iv.hi)
            throw SpecError("coordinate '" + spec.coordinates[static_cast<std::size_t>(c)] +
                            "' has no bounded sample box");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        std::vector<double> p(static_cast<std::size_t>(spec.dim));
        for (int c = 0; c < spec.dim; ++c) {
            const auto& iv = spec.domain[static_cast<std::size_t>(c)];
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            p[static_cast<std::size_t>(c)] = *iv.lo + u * (*iv.hi - *iv.lo);
        }
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace ccc
