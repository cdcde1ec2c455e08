#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ccc/report.hpp"
#include "support.hpp"

using ccc::CertificationReport;
using ccc::CheckBlock;
using ccc::ConstantBlock;
using ccc::ParseError;
using ccc::RunConfig;
using ccc::SpecError;
using ccc::builtin_model;
using ccc::parse_report;
using ccc::render_report;
using ccc::report_to_json;
using ccc::run_certification;
using ccc::serialize_manifold_spec;

namespace {

RunConfig model_config(const std::string& model, const std::string& pipeline, int points) {
    RunConfig cfg;
    cfg.model = model;
    cfg.pipeline = pipeline;
    cfg.points = points;
    cfg.seed = 3;
    cfg.threads = 1;
    return cfg;
}

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

}  // namespace

TEST_CASE("warped model passes the full pipeline with sign class zero", "[report]") {
    CertificationReport rep = run_certification(model_config("warped_type9", "all", 12));

    CHECK(rep.pass);
    CHECK(rep.spec_name == "warped_type9");
    CHECK(rep.dim == 6);
    CHECK(rep.n == 3);
    CHECK(rep.spec_hash.size() == 16);
    CHECK(rep.spec_hash.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(rep.class_label == "zero");

    for (const char* name :
         {"validation.metric_symmetric", "kahler.complex_structure_parallel",
          "bochner.trace_free_curvature", "forward.flat_curvature", "forward.lee_parallel",
          "forward.tau_negative", "inverse.bochner_flat", "inverse.flat_curvature"}) {
        const CheckBlock* block = rep.find(name);
        REQUIRE(block != nullptr);
        CHECK(block->pass);
    }

    for (const char* name : {"bochner_constant", "b0_constant", "a_plus_k2"}) {
        const ConstantBlock* c = rep.find_constant(name);
        REQUIRE(c != nullptr);
        CHECK(c->pass);
        CHECK(std::abs(c->mean) / c->scale < 1e-6);
        CHECK(c->spread / c->scale < 1e-6);
    }
}

TEST_CASE("json rendering round-trips through the parser", "[report]") {
    CertificationReport rep = run_certification(model_config("warped_type9", "all", 6));
    const std::string first = render_report(rep, "json");
    CertificationReport back = parse_report(first);
    CHECK(render_report(back, "json") == first);

    CHECK(back.spec_hash == rep.spec_hash);
    CHECK(back.checks.size() == rep.checks.size());
    CHECK(back.constants.size() == rep.constants.size());
    CHECK(back.class_label == rep.class_label);
    CHECK(back.pass == rep.pass);

    // A default-constructed report renders to valid JSON with empty blocks.
    CertificationReport empty;
    CertificationReport empty_back = parse_report(render_report(empty, "json"));
    CHECK(empty_back.checks.empty());
    CHECK(empty_back.constants.empty());
    CHECK_FALSE(empty_back.pass);
}

TEST_CASE("identical configurations render identical bytes", "[report]") {
    const std::string a =
        render_report(run_certification(model_config("warped_type9", "validate", 10)), "json");
    const std::string b =
        render_report(run_certification(model_config("warped_type9", "validate", 10)), "json");
    CHECK(a == b);
}

TEST_CASE("unusable configurations are rejected", "[report]") {
    RunConfig both = model_config("flat", "validate", 4);
    both.file = "/tmp/whatever.json";
    CHECK_THROWS_AS(run_certification(both), SpecError);

    RunConfig neither;
    CHECK_THROWS_AS(run_certification(neither), SpecError);

    RunConfig bad_pipe = model_config("flat", "frobnicate", 4);
    CHECK_THROWS_AS(run_certification(bad_pipe), SpecError);

    RunConfig no_points = model_config("flat", "validate", 0);
    CHECK_THROWS_AS(run_certification(no_points), SpecError);

    // theorem-forward is meaningless without a potential to differentiate.
    RunConfig fwd = model_config("space_form", "theorem-forward", 4);
    CHECK_THROWS_AS(run_certification(fwd), SpecError);

    CertificationReport rep;
    CHECK_THROWS_AS(render_report(rep, "yaml"), SpecError);
}

TEST_CASE("threshold overrides reach the named block", "[report]") {
    RunConfig cfg = model_config("warped_type9", "theorem-forward", 5);
    cfg.tol["forward.flat_curvature"] = 1e-3;
    CertificationReport rep = run_certification(cfg);
    const CheckBlock* block = rep.find("forward.flat_curvature");
    REQUIRE(block != nullptr);
    CHECK(block->threshold == 1e-3);

    const CheckBlock* untouched = rep.find("forward.lee_parallel");
    REQUIRE(untouched != nullptr);
    CHECK(untouched->threshold == 1e-6);
}

TEST_CASE("bochner pipeline certifies constancy, not vanishing", "[report]") {
    // The space form has a nonzero curvature invariant; the bochner pipeline
    // must accept it as long as the value is constant across points.
    CertificationReport rep = run_certification(model_config("space_form", "bochner", 10));
    CHECK(rep.pass);
    const ConstantBlock* c = rep.find_constant("bochner_constant");
    REQUIRE(c != nullptr);
    CHECK(c->pass);
    CHECK(std::abs(c->mean - 96.0) < 1e-9 * 96.0);
    CHECK(c->spread / c->scale < 1e-10);
}

TEST_CASE("potential-free spec skips the forward pipeline with a note", "[report]") {
    CertificationReport rep = run_certification(model_config("space_form", "all", 6));
    CHECK(rep.find("forward.flat_curvature") == nullptr);
    bool noted = false;
    for (const auto& n : rep.notes)
        noted = noted || n.find("forward pipeline skipped") != std::string::npos;
    CHECK(noted);
    // The constant-scalar-curvature control still fails the inverse
    // hypotheses (its scalar field has no gradient), so the verdict is FAIL.
    CHECK_FALSE(rep.pass);
    const CheckBlock* reg = rep.find("inverse.scalar_field_regular");
    REQUIRE(reg != nullptr);
    CHECK_FALSE(reg->pass);
}

TEST_CASE("a potential override reaches the forward pipeline", "[report]") {
    RunConfig cfg = model_config("flat", "all", 5);
    cfg.potential = "0";
    CertificationReport rep = run_certification(cfg);
    // Zero potential on flat space: the connection checks pass everywhere
    // and the forward chain is vacuous (no scalar frame anywhere).
    const CheckBlock* flat = rep.find("forward.flat_curvature");
    REQUIRE(flat != nullptr);
    CHECK(flat->pass);
    bool noted = false;
    for (const auto& n : rep.notes)
        noted = noted || n.find("not applicable") != std::string::npos;
    CHECK(noted);
    // The inverse certifier still (correctly) rejects the spec: with zero
    // scalar curvature there is no gradient field to build the potential
    // from, exactly as for the space form.
    const CheckBlock* reg = rep.find("inverse.scalar_field_regular");
    REQUIRE(reg != nullptr);
    CHECK_FALSE(reg->pass);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("file-backed specs load and certify identically", "[report]") {
    const std::string path = temp_path("ccc_report_spec.json");
    {
        std::ofstream out(path);
        out << serialize_manifold_spec(builtin_model("warped_type9", {}));
    }
    RunConfig from_file;
    from_file.file = path;
    from_file.pipeline = "validate";
    from_file.points = 6;
    from_file.seed = 3;
    from_file.threads = 1;
    CertificationReport file_rep = run_certification(from_file);
    CertificationReport model_rep = run_certification(model_config("warped_type9", "validate", 6));
    CHECK(file_rep.pass);
    CHECK(file_rep.spec_hash == model_rep.spec_hash);
    CHECK(render_report(file_rep, "json") == render_report(model_rep, "json"));
    std::remove(path.c_str());
}

TEST_CASE("malformed spec files and reports are rejected", "[report]") {
    const std::string path = temp_path("ccc_report_broken.json");
    {
        std::ofstream out(path);
        out << "{this is not json";
    }
    RunConfig cfg;
    cfg.file = path;
    CHECK_THROWS_AS(run_certification(cfg), ParseError);
    std::remove(path.c_str());

    RunConfig missing;
    missing.file = temp_path("ccc_report_does_not_exist.json");
    CHECK_THROWS_AS(run_certification(missing), SpecError);

    CHECK_THROWS_AS(parse_report("{nope"), ParseError);
    CHECK_THROWS_AS(parse_report("{}"), SpecError);
    CHECK_THROWS_AS(parse_report(R"({"spec": {"name": 7}})"), SpecError);
}

TEST_CASE("text rendering carries the verdict and every block", "[report]") {
    CertificationReport rep = run_certification(model_config("warped_type9", "validate", 5));
    const std::string text = render_report(rep, "text");
    CHECK(text.find("certification report: warped_type9") != std::string::npos);
    CHECK(text.find("verdict   : PASS") != std::string::npos);
    for (const auto& block : rep.checks)
        CHECK(text.find(block.name) != std::string::npos);

    CertificationReport failing = run_certification(model_config("space_form", "theorem-inverse", 5));
    const std::string failing_text = render_report(failing, "text");
    CHECK(failing_text.find("verdict   : FAIL") != std::string::npos);
    CHECK(failing_text.find("[FAIL]") != std::string::npos);
}
