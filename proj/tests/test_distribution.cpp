// Tests for the scalar-distribution data and the two-directional theorem
// certifier: the unit frame along grad τ, the slope extraction, the π/Φ
// curvature decomposition, and the forward/inverse certification runs.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ccc/distribution.hpp"
#include "ccc/models.hpp"
#include "support.hpp"

using namespace ccc;

namespace {

ManifoldSpec warped3() { return builtin_model("warped_type9", {{"n", 3}}); }
ManifoldSpec warped2() { return builtin_model("warped_type9", {{"n", 2}}); }

}  // namespace

TEST_CASE("scalar frame is the normalized gradient frame", "[distribution]") {
    ManifoldSpec spec = warped3();
    for (const auto& p : sample_points(spec, 6, 21)) {
        MetricFrame f = metric_frame(spec, p);
        CurvatureBundle bu = curvature_bundle(spec, p);
        ScalarFrame sf = scalar_frame(bu, f);
        const int d = sf.dim;
        REQUIRE(d == 6);

        // {ξ, Jξ} is g-orthonormal and η is the metric dual of ξ.
        double xx = 0.0, jj = 0.0, xj = 0.0, ex = 0.0, ejx = 0.0;
        for (int i = 0; i < d; ++i) {
            ex += sf.eta[static_cast<std::size_t>(i)] * sf.xi[static_cast<std::size_t>(i)];
            ejx += sf.eta[static_cast<std::size_t>(i)] * sf.Jxi[static_cast<std::size_t>(i)];
            for (int j = 0; j < d; ++j) {
                xx += f.g_at(i, j) * sf.xi[static_cast<std::size_t>(i)] *
                      sf.xi[static_cast<std::size_t>(j)];
                jj += f.g_at(i, j) * sf.Jxi[static_cast<std::size_t>(i)] *
                      sf.Jxi[static_cast<std::size_t>(j)];
                xj += f.g_at(i, j) * sf.xi[static_cast<std::size_t>(i)] *
                      sf.Jxi[static_cast<std::size_t>(j)];
            }
        }
        CHECK(std::abs(xx - 1.0) < 1e-10);
        CHECK(std::abs(jj - 1.0) < 1e-10);
        CHECK(std::abs(xj) < 1e-10);
        CHECK(std::abs(ex - 1.0) < 1e-10);
        CHECK(std::abs(ejx) < 1e-10);

        // On this family the Lee vector P points along ξ with
        // ξ = 2√((n+1)(n+2)/(−τ))·P.
        LeeData lee = lee_data(spec, p);
        const double scale = 2.0 * std::sqrt(20.0 / (-bu.tau));
        for (int i = 0; i < d; ++i)
            CHECK(std::abs(sf.xi[static_cast<std::size_t>(i)] -
                           scale * lee.P[static_cast<std::size_t>(i)]) < 1e-7);
    }
}

TEST_CASE("constant scalar curvature has no scalar frame", "[distribution]") {
    ManifoldSpec spec = builtin_model("space_form", {{"n", 3}, {"c", -4.0}});
    std::vector<double> p{0.05, -0.1, 0.08, 0.02, -0.04, 0.06};
    CHECK_THROWS_AS(scalar_frame(spec, p), DegenerateFieldError);
    CHECK_THROWS_AS(b0_residuals(spec, p), DegenerateFieldError);
    CHECK_THROWS_AS(distribution_data(spec, p), DegenerateFieldError);
    CHECK_THROWS_AS(pi_phi_decomposition(spec, p), DegenerateFieldError);
}

TEST_CASE("distribution slopes match the profile", "[distribution]") {
    ManifoldSpec spec = warped3();
    for (const auto& p : sample_points(spec, 5, 33)) {
        B0Data b0 = b0_residuals(spec, p);
        const double tau = b0.frame.tau;
        REQUIRE(tau < 0.0);
        const double k_th = -std::sqrt(-tau / 20.0);
        CHECK(b0.k < 0.0);
        CHECK(std::abs(b0.k - k_th) < 1e-7 * std::abs(k_th));
        CHECK(std::abs(b0.p_star - 1.5 * std::sqrt(-tau / 20.0)) <
              1e-7 * std::abs(b0.p_star));
        CHECK(b0.ansatz_residual < 1e-7);
        CHECK(b0.dk_collinearity < 1e-7);
        CHECK(b0.p_star_formula < 1e-7);
        // p* is tied to the slope's own derivative: p* = −(ξ(k) + k²)/k.
        CHECK(std::abs(b0.p_star + (b0.xi_k + b0.k * b0.k) / b0.k) < 1e-7);
    }
}

TEST_CASE("slope formulas at the tau = -20 section", "[distribution]") {
    // The base profile has τ = −80(1 − 3t)^{−2/3}; scaling the metric by 4
    // divides τ by 4, putting the τ = −20 section at t = 0.
    ManifoldSpec spec = support::scaled_metric_spec(warped3(), 4.0);
    std::vector<double> p{0.0, 0.1, -0.2, 0.3, 0.15, 0.05};
    CurvatureBundle bu = curvature_bundle(spec, p);
    REQUIRE(std::abs(bu.tau + 20.0) < 1e-9 * 20.0);

    B0Data b0 = b0_residuals(spec, p);
    CHECK(std::abs(b0.k + 1.0) < 1e-7);
    CHECK(std::abs(b0.p_star - 1.5) < 1e-7);

    DistributionData dd = distribution_data(spec, p);
    CHECK(std::abs(dd.a + 1.0) < 1e-7);
    CHECK(std::abs(dd.b + 2.0) < 1e-7);
    CHECK(std::abs(dd.frak_b0) < 1e-7);
    CHECK(std::abs(dd.a_plus_k2) < 1e-7);
    CHECK(dd.cls == SignClass::zero);
    // Independent paths for the same slope: trace-extracted k against −√(−a).
    CHECK(std::abs(dd.k + std::sqrt(-dd.a)) < 1e-6 * std::abs(dd.k));
}

TEST_CASE("geometric scalars from tau and b0", "[distribution]") {
    CurvatureBundle b;
    b.dim = 6;
    b.tau = -20.0;
    GeometricFunctions gf = geometric_functions(b, 0.0);
    CHECK(std::abs(gf.a + 1.0) < 1e-12);
    CHECK(std::abs(gf.b + 2.0) < 1e-12);

    // Round-trip: (2a − b)/2 recovers the supplied constant for any 𝔟₀.
    for (double b0 : {0.37, -1.25, 4.0}) {
        GeometricFunctions g2 = geometric_functions(b, b0);
        CHECK(std::abs((2.0 * g2.a - g2.b) / 2.0 - b0) < 1e-12 * std::max(1.0, std::abs(b0)));
    }

    CurvatureBundle b4;
    b4.dim = 4;
    b4.tau = -12.0;
    GeometricFunctions g4 = geometric_functions(b4, 0.4);
    CHECK(std::abs(g4.a + 0.8) < 1e-12);
    CHECK(std::abs(g4.b + 2.4) < 1e-12);
}

TEST_CASE("curvature decomposes against the hermitian pair", "[distribution]") {
    ManifoldSpec spec = warped3();
    for (const auto& p : sample_points(spec, 5, 47)) {
        CurvatureBundle bu = curvature_bundle(spec, p);
        DecompositionFit fit = pi_phi_decomposition(bu, metric_frame(spec, p));
        CHECK(fit.phi_used);
        CHECK(fit.residual < 1e-7);
        CHECK(std::abs(fit.a - bu.tau / 20.0) < 1e-7 * std::max(1.0, std::abs(bu.tau) / 20.0));
        CHECK(std::abs(fit.b - bu.tau / 10.0) < 1e-7 * std::max(1.0, std::abs(bu.tau) / 10.0));
    }
}

TEST_CASE("space forms decompose against pi alone", "[distribution]") {
    ManifoldSpec spec = builtin_model("space_form", {{"n", 3}, {"c", -4.0}});
    std::vector<double> p{0.04, -0.07, 0.1, 0.0, 0.12, -0.05};
    DecompositionFit fit = pi_only_decomposition(spec, p);
    CHECK_FALSE(fit.phi_used);
    CHECK(std::abs(fit.a + 4.0) < 1e-8);
    CHECK(fit.residual < 1e-9);
}

TEST_CASE("forward certification passes on the model family", "[distribution]") {
    ManifoldSpec spec = warped3();
    auto pts = sample_points(spec, 12, 7);
    TheoremReport rep = certify_forward(spec, pts);
    REQUIRE(rep.applicable);
    CHECK(rep.dim == 6);
    CHECK(rep.n == 3);
    CHECK(rep.points_used == 12);
    CHECK(rep.points_degenerate == 0);
    CHECK(rep.tau_sign_violations == 0);
    for (const auto& [name, rs] : rep.residual_items()) {
        INFO(name);
        CHECK(rs->max < 1e-6);
    }
    for (const auto& [name, cs] : rep.constant_items()) {
        INFO(name);
        CHECK(cs->mean_normalized() < 1e-6);
        CHECK(cs->spread_normalized() < 1e-6);
        CHECK(cs->max_normalized() < 1e-6);
    }
    CHECK(rep.pass);
}

TEST_CASE("forward certification passes in dimension four", "[distribution]") {
    ManifoldSpec spec = warped2();
    TheoremReport rep = certify_forward(spec, sample_points(spec, 8, 11));
    REQUIRE(rep.applicable);
    CHECK(rep.n == 2);
    CHECK(rep.pass);
}

TEST_CASE("forward certification is vacuous without a Lee form", "[distribution]") {
    ManifoldSpec spec = with_potential(builtin_model("flat", {{"n", 3}}), "0");
    TheoremReport rep = certify_forward(spec, sample_points(spec, 5, 3));
    CHECK_FALSE(rep.applicable);
    CHECK(rep.points_used == 0);
    CHECK(rep.points_degenerate == 5);
    CHECK_FALSE(rep.not_applicable_reason.empty());
    // The chain is vacuous, but the connection itself is flat: u ≡ 0 keeps
    // the Levi-Civita connection, so the connection-level residuals pass.
    CHECK(rep.flat_curvature.max < 1e-12);
    CHECK(rep.lee_parallel.max < 1e-12);
    CHECK(rep.pass);
}

TEST_CASE("forward certification flags a non-flat connection without a frame",
          "[distribution]") {
    // Flat base with a linear potential: dτ = 0 so the chain is vacuous,
    // but the induced connection is not flat and the Lee form is not
    // parallel — both connection-level checks must fail.
    ManifoldSpec spec = with_potential(builtin_model("flat", {{"n", 3}}), "x1");
    TheoremReport rep = certify_forward(spec, sample_points(spec, 4, 9));
    CHECK_FALSE(rep.applicable);
    CHECK(rep.flat_curvature.max > 1e-3);
    CHECK(rep.lee_parallel.max > 1e-2);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("forward certification fails off the model family", "[distribution]") {
    ManifoldSpec spec = with_potential(support::surface_product_spec(), "0.1*x1");
    TheoremReport rep = certify_forward(spec, sample_points(spec, 4, 13));
    REQUIRE(rep.applicable);
    CHECK_FALSE(rep.pass);
    CHECK(rep.flat_curvature.max > 1e-4);
}

TEST_CASE("forward certification requires a potential and a sample", "[distribution]") {
    CHECK_THROWS_AS(certify_forward(without_potential(warped3()), {{0, 0, 0, 0, 0, 0}}),
                    SpecError);
    CHECK_THROWS_AS(certify_forward(warped3(), {}), SpecError);
    CHECK_THROWS_AS(certify_inverse(without_potential(warped3()), {}), SpecError);
}

TEST_CASE("inverse certification reconstructs the potential", "[distribution]") {
    ManifoldSpec full = warped3();
    ManifoldSpec spec = without_potential(full);
    REQUIRE_FALSE(spec.has_potential());
    auto pts = sample_points(spec, 8, 17);
    InverseReport rep = certify_inverse(spec, pts);
    for (const auto& v : rep.preconditions) {
        INFO(v.name << " value=" << v.value);
        CHECK(v.pass);
    }
    REQUIRE(rep.preconditions_pass);
    CHECK(rep.points_used == 8);
    CHECK(rep.flat_curvature.max < 1e-6);
    CHECK(rep.nabla_eta.max < 1e-6);
    CHECK(rep.k_consistency.max < 1e-6);
    CHECK(rep.xi_tau.max < 1e-6);
    CHECK(rep.pass);

    // The constructed potential is the one the family was built with.
    REQUIRE(rep.constructed_u.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double want = full.potential_u->eval(pts[i]);
        CHECK(std::abs(rep.constructed_u[i] - want) < 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("inverse certification rejects a constant-curvature space", "[distribution]") {
    ManifoldSpec spec = builtin_model("space_form", {{"n", 3}, {"c", -4.0}});
    InverseReport rep = certify_inverse(spec, sample_points(spec, 4, 19));
    const PreconditionVerdict* bochner = rep.find("bochner_flat");
    const PreconditionVerdict* regular = rep.find("scalar_field_regular");
    REQUIRE(bochner != nullptr);
    REQUIRE(regular != nullptr);
    CHECK(bochner->pass);        // space forms are Bochner-flat
    CHECK_FALSE(regular->pass);  // but τ is constant: no scalar frame
    CHECK_FALSE(rep.preconditions_pass);
    CHECK_FALSE(rep.pass);
    CHECK(rep.points_used == 0);
}

TEST_CASE("inverse certification rejects a spec with a potential attached", "[distribution]") {
    ManifoldSpec spec = warped3();
    CHECK_THROWS_AS(certify_inverse(spec, sample_points(spec, 2, 5)), SpecError);
}

TEST_CASE("certification is deterministic across worker counts", "[distribution]") {
    ManifoldSpec spec = warped3();
    auto pts = sample_points(spec, 6, 41);
    TheoremReport a = certify_forward(spec, pts, kTheoremTol, 1);
    TheoremReport b = certify_forward(spec, pts, kTheoremTol, 4);
    auto ia = a.residual_items();
    auto ib = b.residual_items();
    REQUIRE(ia.size() == ib.size());
    for (std::size_t i = 0; i < ia.size(); ++i) {
        INFO(ia[i].first);
        CHECK(ia[i].second->max == ib[i].second->max);
        CHECK(ia[i].second->mean == ib[i].second->mean);
    }
    CHECK(a.a_plus_k2.mean == b.a_plus_k2.mean);
    CHECK(a.a_plus_k2.stddev == b.a_plus_k2.stddev);

    ManifoldSpec bare = without_potential(spec);
    InverseReport va = certify_inverse(bare, pts, kTheoremTol, 1);
    InverseReport vb = certify_inverse(bare, pts, kTheoremTol, 4);
    CHECK(va.flat_curvature.max == vb.flat_curvature.max);
    CHECK(va.flat_curvature.mean == vb.flat_curvature.mean);
    CHECK(va.nabla_eta.max == vb.nabla_eta.max);
    CHECK(va.constructed_u == vb.constructed_u);
}

TEST_CASE("inverse certificate is homothety invariant", "[distribution]") {
    ManifoldSpec spec =
        without_potential(support::scaled_metric_spec(warped3(), 2.0));
    InverseReport rep = certify_inverse(spec, sample_points(spec, 6, 29));
    for (const auto& v : rep.preconditions) {
        INFO(v.name << " value=" << v.value);
        CHECK(v.pass);
    }
    CHECK(rep.pass);
    CHECK(rep.flat_curvature.max < 1e-6);
}
