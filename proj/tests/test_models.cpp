#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ccc/models.hpp"

using ccc::ManifoldSpec;
using ccc::SpecError;
using ccc::builtin_model;
using ccc::linalg::at;
using ccc::sample_points;

TEST_CASE("catalog lists the four built-ins", "[models]") {
    auto catalog = ccc::model_catalog();
    REQUIRE(catalog.size() == 4);
    REQUIRE(catalog[0].name == "flat");
    REQUIRE(catalog[1].name == "space_form");
    REQUIRE(catalog[2].name == "warped_type9");
    REQUIRE(catalog[3].name == "perturbed_flat");
}

TEST_CASE("flat model is the identity chart", "[models]") {
    ManifoldSpec spec = builtin_model("flat", {{"n", 3.0}});
    REQUIRE(spec.dim == 6);
    std::vector<double> p = {0.4, -0.7, 0.2, 0.0, -0.3, 0.8};
    auto g = spec.metric_at(p);
    auto J = spec.complex_structure_at(p);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            REQUIRE(g[at(6, i, j)] == (i == j ? 1.0 : 0.0));
    // standard block: J ∂x_k = ∂y_k, J ∂y_k = −∂x_k
    REQUIRE(J[at(6, 1, 0)] == 1.0);
    REQUIRE(J[at(6, 0, 1)] == -1.0);
    REQUIRE(J[at(6, 5, 4)] == 1.0);
    REQUIRE(J[at(6, 4, 5)] == -1.0);
    REQUIRE(J[at(6, 0, 0)] == 0.0);
}

TEST_CASE("space form has the identity metric at the chart origin", "[models]") {
    ManifoldSpec spec = builtin_model("space_form", {{"c", -4.0}});
    std::vector<double> origin(6, 0.0);
    auto g = spec.metric_at(origin);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            REQUIRE_THAT(g[at(6, i, j)],
                         Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-15));
}

TEST_CASE("warped model metric values at the profile origin", "[models]") {
    ManifoldSpec spec = builtin_model("warped_type9", {{"t0", 0.0}});
    REQUIRE(spec.dim == 6);
    REQUIRE(spec.coordinates ==
            std::vector<std::string>{"t", "x1", "y1", "x2", "y2", "z"});
    REQUIRE(spec.has_potential());

    // at (t=0, 0,0,0,0,0): p = 1, so g = diag(1, ¼, ¼, ¼, ¼, ¼)
    std::vector<double> origin(6, 0.0);
    auto g = spec.metric_at(origin);
    REQUIRE(g[at(6, 0, 0)] == 1.0);  // the dt⊗dt entry, exactly
    for (int i = 1; i < 6; ++i) REQUIRE(g[at(6, i, i)] == 0.25);
    REQUIRE(g[at(6, 1, 5)] == 0.0);

    // with y1 ≠ 0 the contact form mixes x1 and z: g_{x1 z} = −p⁶ y1/4
    std::vector<double> q = {0.0, 0.3, 0.5, -0.2, 0.0, 0.1};
    auto g2 = spec.metric_at(q);
    REQUIRE_THAT(g2[at(6, 1, 5)], Catch::Matchers::WithinRel(-0.5 / 4.0, 1e-14));
    REQUIRE(g2[at(6, 1, 5)] == g2[at(6, 5, 1)]);
}

TEST_CASE("warped model rejects a bad sigma and keeps t inside the profile domain",
          "[models]") {
    REQUIRE_THROWS_AS(builtin_model("warped_type9", {{"sigma", 0.5}}), SpecError);
    ManifoldSpec spec = builtin_model("warped_type9", {{"t0", 1.5}});
    auto pts = sample_points(spec, 200, 7u);
    for (const auto& p : pts) {
        REQUIRE(1.0 - 3.0 * (p[0] - 1.5) > 0.0);
        REQUIRE(spec.in_domain(p));
    }
}

TEST_CASE("space form samples stay inside the chart ball", "[models]") {
    ManifoldSpec spec = builtin_model("space_form", {{"c", -4.0}});
    auto pts = sample_points(spec, 100, 11u);
    for (const auto& p : pts) {
        double z2 = 0.0;
        for (double x : p) z2 += x * x;
        REQUIRE(z2 < 1.0);  // |z|² < 4/|c| = 1
    }
}

TEST_CASE("sampling is deterministic for a fixed seed", "[models]") {
    ManifoldSpec spec = builtin_model("flat");
    auto a = sample_points(spec, 5, 42u);
    auto b = sample_points(spec, 5, 42u);
    REQUIRE(a == b);  // bitwise-identical sequences
    auto c = sample_points(spec, 5, 43u);
    REQUIRE(a != c);
}

TEST_CASE("model parameter validation", "[models]") {
    REQUIRE_THROWS_AS(builtin_model("no_such_model"), SpecError);
    REQUIRE_THROWS_AS(builtin_model("flat", {{"bogus", 1.0}}), SpecError);
    REQUIRE_THROWS_AS(builtin_model("flat", {{"n", 2.5}}), SpecError);
    REQUIRE_THROWS_AS(builtin_model("flat", {{"n", 1.0}}), SpecError);
    REQUIRE_THROWS_AS(builtin_model("space_form", {{"c", 0.0}}), SpecError);
    REQUIRE_THROWS_AS(builtin_model("perturbed_flat", {{"eps", 1.5}}), SpecError);
}

TEST_CASE("sample_points needs a bounded box", "[models]") {
    ManifoldSpec spec = builtin_model("flat");
    spec.domain[2] = ccc::CoordinateInterval{};  // unbound one coordinate
    REQUIRE_THROWS_AS(sample_points(spec, 3, 1u), SpecError);
    REQUIRE_THROWS_AS(sample_points(builtin_model("flat"), 0, 1u), SpecError);
}
