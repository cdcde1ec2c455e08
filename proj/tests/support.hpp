#pragma once

#include <string>

#include "ccc/manifold.hpp"

namespace support {

/// A Kähler-by-construction control metric that is NOT Bochner-flat: the
/// Riemannian product of two conformally flat surfaces,
///
///   g = e^{2f(x1,y1)}(dx1² + dy1²) ⊕ e^{2h(x2,y2)}(dx2² + dy2²)
///
/// with the standard complex structure.  Each factor is a complex curve, so
/// the product is Kähler for any f, h; generic factor curvatures make every
/// trace-free curvature component nonzero.
inline ccc::ManifoldSpec surface_product_spec() {
    const std::string ef = "exp(2*(0.3*sin(x1)*cos(y1)))";
    const std::string eh = "exp(2*(0.2*x2^2 - 0.15*y2^2))";
    nlohmann::json doc;
    doc["name"] = "surface_product";
    doc["dim"] = 4;
    doc["coordinates"] = {"x1", "y1", "x2", "y2"};
    doc["params"] = nlohmann::json::object();
    doc["metric"] = {{ef, "0", "0", "0"},
                     {"0", ef, "0", "0"},
                     {"0", "0", eh, "0"},
                     {"0", "0", "0", eh}};
    doc["complex_structure"] = {{"0", "-1", "0", "0"},
                                {"1", "0", "0", "0"},
                                {"0", "0", "0", "-1"},
                                {"0", "0", "1", "0"}};
    doc["potential_u"] = nullptr;
    doc["domain"] = {{"x1", {-1.0, 1.0}},
                     {"y1", {-1.0, 1.0}},
                     {"x2", {-1.0, 1.0}},
                     {"y2", {-1.0, 1.0}}};
    return ccc::manifold_spec_from_json(doc);
}

/// The same spec with every metric entry multiplied by `factor` (a
/// homothety; the complex structure and domain are unchanged).
inline ccc::ManifoldSpec scaled_metric_spec(const ccc::ManifoldSpec& spec, double factor) {
    nlohmann::json doc = ccc::manifold_spec_to_json(spec);
    for (auto& row : doc["metric"])
        for (auto& entry : row)
            entry = ccc::detail::format_double(factor) + "*(" + entry.get<std::string>() + ")";
    return ccc::manifold_spec_from_json(doc);
}

}  // namespace support
