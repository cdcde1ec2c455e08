#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccc/errors.hpp"
#include "ccc/expr.hpp"
#include "ccc/linalg.hpp"

namespace ccc {

// ============================================================================
// Manifold specification documents
// ============================================================================
//
// A chart description: named coordinates, a metric and a complex structure as
// 2n×2n arrays of expressions, an optional scalar potential, and a sampling
// domain. The complex-structure convention is J^i_j with the ROW as the upper
// index: (J X)^i = J^i_j X^j.
//
// JSON schema:
//   {
//     "name": string,
//     "dim": int (even, ≥ 4),
//     "coordinates": [string × dim],
//     "params": { name: number, ... },
//     "metric": [[string × dim] × dim],
//     "complex_structure": [[string × dim] × dim],
//     "potential_u": string | null,
//     "domain": { coordinate: [lo, hi] | null, ... }
//   }

struct CoordinateInterval {
    std::optional<double> lo;
    std::optional<double> hi;
};

struct ManifoldSpec {
    std::string name;
    int dim = 0;
    std::vector<std::string> coordinates;
    std::map<std::string, double> params;

    // Raw component text (kept for serialization) and the parsed forms
    // (parameters substituted, closed over coordinates only).
    std::vector<std::string> metric_src;           // dim×dim, row-major
    std::vector<std::string> complex_structure_src;
    std::optional<std::string> potential_src;

    std::vector<Expr> metric;
    std::vector<Expr> complex_structure;
    std::optional<Expr> potential_u;

    std::vector<CoordinateInterval> domain;  // one per coordinate

    int n() const { return dim / 2; }
    bool has_potential() const { return potential_u.has_value(); }

    bool in_domain(std::span<const double> point) const {
        for (int c = 0; c < dim; ++c) {
            const auto& iv = domain[static_cast<std::size_t>(c)];
            double x = point[static_cast<std::size_t>(c)];
            if (iv.lo && x < *iv.lo) return false;
            if (iv.hi && x > *iv.hi) return false;
        }
        return true;
    }

    /// Numeric metric matrix at a point (row-major dim×dim).
    std::vector<double> metric_at(std::span<const double> point) const {
        std::vector<double> g(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = metric[k].eval(point);
        return g;
    }

    /// Numeric complex-structure matrix at a point.
    std::vector<double> complex_structure_at(std::span<const double> point) const {
        std::vector<double> J(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
        for (std::size_t k = 0; k < J.size(); ++k) J[k] = complex_structure[k].eval(point);
        return J;
    }
};

// ----------------------------------------------------------------------------
// Parsing and serialization
// ----------------------------------------------------------------------------

namespace detail {

inline std::vector<Expr> parse_matrix(const nlohmann::json& arr, const char* field,
                                      const std::vector<std::string>& coords,
                                      const std::map<std::string, double>& params,
                                      int dim, std::vector<std::string>* raw_out) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
        throw SpecError(std::string(field) + " must be a " + std::to_string(dim) +
                        "×" + std::to_string(dim) + " array of strings");
    std::vector<Expr> out;
    out.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const auto& row = arr[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw SpecError(std::string(field) + " row " + std::to_string(i) +
                            " must have " + std::to_string(dim) + " entries");
        for (int j = 0; j < dim; ++j) {
            const auto& cell = row[static_cast<std::size_t>(j)];
            if (!cell.is_string())
                throw SpecError(std::string(field) + "[" + std::to_string(i) + "][" +
                                std::to_string(j) + "] must be a string expression");
            const std::string src = cell.get<std::string>();
            raw_out->push_back(src);
            try {
                out.push_back(parse_expression(src, coords, params));
            } catch (const ParseError& err) {
                throw SpecError(std::string(field) + "[" + std::to_string(i) + "][" +
                                std::to_string(j) + "]: " + err.what());
            }
        }
    }
    return out;
}

}  // namespace detail

inline ManifoldSpec manifold_spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SpecError("spec document must be a JSON object");

    ManifoldSpec spec;

    if (!doc.contains("name") || !doc["name"].is_string())
        throw SpecError("missing string field 'name'");
    spec.name = doc["name"].get<std::string>();

    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw SpecError("missing integer field 'dim'");
    spec.dim = doc["dim"].get<int>();
    if (spec.dim < 4 || spec.dim % 2 != 0)
        throw SpecError("dim must be an even integer ≥ 4, got " +
                        std::to_string(spec.dim));

    if (!doc.contains("coordinates") || !doc["coordinates"].is_array())
        throw SpecError("missing array field 'coordinates'");
    for (const auto& c : doc["coordinates"]) {
        if (!c.is_string()) throw SpecError("coordinates must be strings");
        spec.coordinates.push_back(c.get<std::string>());
    }
    if (static_cast<int>(spec.coordinates.size()) != spec.dim)
        throw SpecError("coordinate count " + std::to_string(spec.coordinates.size()) +
                        " does not match dim " + std::to_string(spec.dim));
    for (std::size_t i = 0; i < spec.coordinates.size(); ++i)
        for (std::size_t j = i + 1; j < spec.coordinates.size(); ++j)
            if (spec.coordinates[i] == spec.coordinates[j])
                throw SpecError("duplicate coordinate name '" + spec.coordinates[i] + "'");

    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw SpecError("params must be an object");
        for (auto it = doc["params"].begin(); it != doc["params"].end(); ++it) {
            if (!it.value().is_number())
                throw SpecError("param '" + it.key() + "' must be a number");
            spec.params[it.key()] = it.value().get<double>();
        }
    }

    if (!doc.contains("metric"))
        throw SpecError("missing field 'metric'");
    spec.metric = detail::parse_matrix(doc["metric"], "metric", spec.coordinates,
                                       spec.params, spec.dim, &spec.metric_src);

    if (!doc.contains("complex_structure"))
        throw SpecError("missing field 'complex_structure'");
    spec.complex_structure =
        detail::parse_matrix(doc["complex_structure"], "complex_structure",
                             spec.coordinates, spec.params, spec.dim,
                             &spec.complex_structure_src);

    if (doc.contains("potential_u") && !doc["potential_u"].is_null()) {
        if (!doc["potential_u"].is_string())
            throw SpecError("potential_u must be a string or null");
        spec.potential_src = doc["potential_u"].get<std::string>();
        try {
            spec.potential_u =
                parse_expression(*spec.potential_src, spec.coordinates, spec.params);
        } catch (const ParseError& err) {
            throw SpecError(std::string("potential_u: ") + err.what());
        }
    }

    spec.domain.assign(static_cast<std::size_t>(spec.dim), CoordinateInterval{});
    if (doc.contains("domain") && !doc["domain"].is_null()) {
        if (!doc["domain"].is_object()) throw SpecError("domain must be an object");
        for (auto it = doc["domain"].begin(); it != doc["domain"].end(); ++it) {
            auto pos = std::find(spec.coordinates.begin(), spec.coordinates.end(), it.key());
            if (pos == spec.coordinates.end())
                throw SpecError("domain names unknown coordinate '" + it.key() + "'");
            auto idx = static_cast<std::size_t>(pos - spec.coordinates.begin());
            if (it.value().is_null()) continue;  // unbounded
            if (!it.value().is_array() || it.value().size() != 2)
                throw SpecError("domain['" + it.key() + "'] must be [lo, hi] or null");
            const auto& lo = it.value()[0];
            const auto& hi = it.value()[1];
            if (!lo.is_null()) {
                if (!lo.is_number()) throw SpecError("domain lower bound must be a number or null");
                spec.domain[idx].lo = lo.get<double>();
            }
            if (!hi.is_null()) {
                if (!hi.is_number()) throw SpecError("domain upper bound must be a number or null");
                spec.domain[idx].hi = hi.get<double>();
            }
            if (spec.domain[idx].lo && spec.domain[idx].hi &&
                *spec.domain[idx].lo > *spec.domain[idx].hi)
                throw SpecError("domain['" + it.key() + "'] is empty");
        }
    }

    return spec;
}

inline ManifoldSpec parse_manifold_spec(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw SpecError(std::string("malformed JSON: ") + err.what());
    }
    return manifold_spec_from_json(doc);
}

inline nlohmann::json manifold_spec_to_json(const ManifoldSpec& spec) {
    nlohmann::json doc;
    doc["name"] = spec.name;
    doc["dim"] = spec.dim;
    doc["coordinates"] = spec.coordinates;
    doc["params"] = nlohmann::json::object();
    for (const auto& [k, v] : spec.params) doc["params"][k] = v;
    auto matrix = [&](const std::vector<std::string>& flat) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < spec.dim; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < spec.dim; ++j)
                row.push_back(flat[linalg::at(spec.dim, i, j)]);
            rows.push_back(row);
        }
        return rows;
    };
    doc["metric"] = matrix(spec.metric_src);
    doc["complex_structure"] = matrix(spec.complex_structure_src);
    if (spec.potential_src)
        doc["potential_u"] = *spec.potential_src;
    else
        doc["potential_u"] = nullptr;
    nlohmann::json dom = nlohmann::json::object();
    for (int c = 0; c < spec.dim; ++c) {
        const auto& iv = spec.domain[static_cast<std::size_t>(c)];
        if (!iv.lo && !iv.hi) {
            dom[spec.coordinates[static_cast<std::size_t>(c)]] = nullptr;
        } else {
            nlohmann::json pair = nlohmann::json::array();
            pair.push_back(iv.lo ? nlohmann::json(*iv.lo) : nlohmann::json(nullptr));
            pair.push_back(iv.hi ? nlohmann::json(*iv.hi) : nlohmann::json(nullptr));
            dom[spec.coordinates[static_cast<std::size_t>(c)]] = pair;
        }
    }
    doc["domain"] = dom;
    return doc;
}

inline std::string serialize_manifold_spec(const ManifoldSpec& spec) {
    return manifold_spec_to_json(spec).dump(2);
}

/// Returns a copy of `spec` with no scalar potential attached (the inverse
/// certifier requires the potential to be absent so it can construct one).
inline ManifoldSpec without_potential(ManifoldSpec spec) {
    spec.potential_u.reset();
    spec.potential_src.reset();
    return spec;
}

/// Returns a copy of `spec` whose scalar potential is replaced by `u_src`,
/// parsed over the spec's coordinates with its parameters substituted.
inline ManifoldSpec with_potential(ManifoldSpec spec, const std::string& u_src) {
    try {
        spec.potential_u = parse_expression(u_src, spec.coordinates, spec.params);
    } catch (const Error& err) {
        throw SpecError(std::string("potential_u: ") + err.what());
    }
    spec.potential_src = u_src;
    return spec;
}

// ----------------------------------------------------------------------------
// Structural validation
// ----------------------------------------------------------------------------

struct InvariantCheck {
    std::string name;
    double threshold = 0.0;
    double worst = 0.0;              // largest residual over all probes
    std::vector<double> worst_point; // probe where it occurred
    bool pass = true;
};

struct ValidationReport {
    std::vector<InvariantCheck> checks;
    bool pass = true;

    const InvariantCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Checks the structural axioms at each probe: the metric is symmetric and
/// positive definite, J squares to minus the identity, and the metric is
/// Hermitian with respect to J. A positive-definiteness failure is a FAIL
/// verdict, never an exception; a singular (condition > 1e12) metric at a
/// probe is a numerical-breakdown error.
inline ValidationReport validate_spec(const ManifoldSpec& spec,
                                      std::span<const std::vector<double>> probes) {
    constexpr double kSymTol = 1e-12;
    constexpr double kJTol = 1e-10;
    constexpr double kHermTol = 1e-10;
    constexpr double kCondLimit = 1e12;

    ValidationReport report;
    report.checks = {
        {"metric_symmetric", kSymTol, 0.0, {}, true},
        {"metric_positive_definite", 0.0, 0.0, {}, true},
        {"complex_structure_squares_to_minus_identity", kJTol, 0.0, {}, true},
        {"hermitian_metric", kHermTol, 0.0, {}, true},
    };
    const int d = spec.dim;

    for (const auto& probe : probes) {
        if (static_cast<int>(probe.size()) != d)
            throw SpecError("probe dimension does not match spec dim");
        if (!spec.in_domain(probe))
            throw SpecError("probe outside the declared chart domain");

        std::vector<double> g = spec.metric_at(probe);
        std::vector<double> J = spec.complex_structure_at(probe);
        const double gscale = std::max(1.0, linalg::max_abs(g));

        auto& sym = report.checks[0];
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                double r = std::abs(g[linalg::at(d, i, j)] - g[linalg::at(d, j, i)]) / gscale;
                if (r > sym.worst) { sym.worst = r; sym.worst_point = probe; }
            }

        auto& pd = report.checks[1];
        double defect = linalg::positive_definite_defect(d, g);
        if (defect > pd.worst) { pd.worst = defect; pd.worst_point = probe; }

        auto& jsq = report.checks[2];
        std::vector<double> JJ = linalg::matmul(d, J, J);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double want = (i == j) ? -1.0 : 0.0;
                double r = std::abs(JJ[linalg::at(d, i, j)] - want);
                if (r > jsq.worst) { jsq.worst = r; jsq.worst_point = probe; }
            }

        // Hermitian: g(JX, JY) = g(X, Y), i.e. Jᵀ g J = g.
        auto& herm = report.checks[3];
        std::vector<double> Jt(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) Jt[linalg::at(d, i, j)] = J[linalg::at(d, j, i)];
        std::vector<double> JtgJ = linalg::matmul(d, Jt, linalg::matmul(d, g, J));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double r = std::abs(JtgJ[linalg::at(d, i, j)] - g[linalg::at(d, i, j)]) / gscale;
                if (r > herm.worst) { herm.worst = r; herm.worst_point = probe; }
            }

        if (defect == 0.0) {
            std::vector<double> ginv = linalg::inverse(d, g);
            if (linalg::condition_estimate(d, g, ginv) > kCondLimit)
                throw SingularError("metric condition estimate above 1e12 at a probe");
        }
    }

    for (auto& c : report.checks) {
        c.pass = c.worst <= c.threshold;
        report.pass = report.pass && c.pass;
    }
    return report;
}

}  // namespace ccc
