#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccc/bochner.hpp"
#include "ccc/distribution.hpp"
#include "ccc/manifold.hpp"
#include "ccc/models.hpp"
#include "ccc/parallel.hpp"

#include <json.hpp>

namespace ccc {

// ============================================================================
// Certification orchestration: run the selected pipelines over a sampled
// spec and assemble one self-describing report.
//
// Every check block carries the exact threshold it was judged against, so
// a rendered report can be compared without knowing the defaults.  The
// overall verdict is the conjunction of the enabled blocks.  Reports are
// byte-deterministic for a fixed (source, pipeline, seed, points,
// tolerance) tuple: per-point work may run on several threads, but the
// reduction is ordered by point index.
// ============================================================================

/// Default threshold for pointwise identity checks (structure equations,
/// curvature identities); constants-spread and theorem verdicts default to
/// the looser kTheoremTol.
inline constexpr double kIdentityTol = 1e-7;

struct CheckBlock {
    std::string name;
    double max = 0.0;
    double mean = 0.0;
    double threshold = 0.0;
    bool pass = false;
    int points = 0;
    std::string note;
};

struct ConstantBlock {
    std::string name;
    double mean = 0.0;
    double spread = 0.0;
    double max_abs = 0.0;
    double scale = 1.0;
    double threshold = 0.0;
    bool pass = false;
    int points = 0;
};

struct RunConfig {
    std::optional<std::string> file;   // spec JSON path …
    std::optional<std::string> model;  // … or built-in model name (exactly one)
    std::map<std::string, double> params;
    std::optional<std::string> potential;  // attach/override the scalar potential
    std::string pipeline = "all";  // validate | bochner | theorem-forward | theorem-inverse | all
    int points = 100;
    std::uint64_t seed = 7;
    std::map<std::string, double> tol;  // per-check threshold overrides by block name
    int threads = 0;                    // 0 → certify_thread_count()
};

struct CertificationReport {
    std::string spec_name;
    std::string spec_hash;  // FNV-1a of the canonical spec JSON
    int dim = 0;
    int n = 0;
    std::string pipeline;
    std::uint64_t seed = 0;
    int points = 0;
    std::vector<CheckBlock> checks;
    std::vector<ConstantBlock> constants;
    std::string class_label = "undefined";  // sign class of a + k² where defined
    std::vector<std::string> notes;
    bool pass = false;

    const CheckBlock* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    const ConstantBlock* find_constant(const std::string& name) const {
        for (const auto& c : constants)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// ----------------------------------------------------------------------------
// Spec identity
// ----------------------------------------------------------------------------

/// 64-bit FNV-1a over bytes, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

// ----------------------------------------------------------------------------
// run_certification
// ----------------------------------------------------------------------------

namespace detail {

inline double pick_tol(const RunConfig& cfg, const std::string& name, double fallback) {
    auto it = cfg.tol.find(name);
    return it == cfg.tol.end() ? fallback : it->second;
}

inline void add_check(CertificationReport& rep, std::string name, double max, double mean,
                      double threshold, int points, std::string note = "") {
    rep.checks.push_back(
        {std::move(name), max, mean, threshold, max < threshold, points, std::move(note)});
}

inline void run_validate(const ManifoldSpec& spec, const std::vector<std::vector<double>>& pts,
                         const RunConfig& cfg, CertificationReport& rep) {
    ValidationReport vr = validate_spec(spec, pts);
    for (const auto& c : vr.checks) {
        CheckBlock block;
        block.name = "validation." + c.name;
        block.max = c.worst;
        block.mean = c.worst;
        block.threshold = pick_tol(cfg, block.name, c.threshold);
        // Flag-style checks (threshold 0, e.g. positive definiteness) keep
        // their verdict; residual checks are re-judged against the block
        // threshold so overrides take effect.
        block.pass = block.threshold > 0.0 ? block.max < block.threshold : c.pass;
        block.points = static_cast<int>(pts.size());
        rep.checks.push_back(block);
    }
    KahlerResiduals kr = kahler_residuals(spec, pts);
    add_check(rep, "kahler.complex_structure_parallel", kr.nabla_J_max, kr.nabla_J_max,
              pick_tol(cfg, "kahler.complex_structure_parallel", 1e-8),
              static_cast<int>(pts.size()));
    add_check(rep, "kahler.hermitian_metric", kr.hermitian_max, kr.hermitian_max,
              pick_tol(cfg, "kahler.hermitian_metric", 1e-10), static_cast<int>(pts.size()));
    add_check(rep, "kahler.closed_fundamental_form", kr.dOmega_max, kr.dOmega_max,
              pick_tol(cfg, "kahler.closed_fundamental_form", 1e-8),
              static_cast<int>(pts.size()));
}

inline void run_bochner(const ManifoldSpec& spec, const std::vector<std::vector<double>>& pts,
                        const RunConfig& cfg, CertificationReport& rep, int threads,
                        bool emit_constant) {
    struct Slot {
        double flat = 0.0, nabla_rho = 0.0, frak_b = 0.0, tau_sq = 0.0;
    };
    std::vector<Slot> slots(pts.size());
    parallel_for_index(pts.size(), threads, [&](std::size_t i) {
        BochnerData bd = bochner_data(spec, pts[i]);
        CurvatureBundle bu = curvature_bundle(spec, pts[i]);
        slots[i] = {bd.bochner_flat_residual, bd.nabla_rho_residual, bd.frak_b,
                    bu.tau * bu.tau};
    });
    ResidualSummary flat, nrho;
    ConstantAccumulator fb;
    double tau_sq_sum = 0.0;
    for (const auto& s : slots) {
        flat.add(s.flat);
        nrho.add(s.nabla_rho);
        fb.add(s.frak_b);
        tau_sq_sum += s.tau_sq;
    }
    add_check(rep, "bochner.trace_free_curvature", flat.max, flat.mean,
              pick_tol(cfg, "bochner.trace_free_curvature", kBochnerFlatTol), flat.points);
    add_check(rep, "bochner.ricci_derivative", nrho.max, nrho.mean,
              pick_tol(cfg, "bochner.ricci_derivative", kIdentityTol), nrho.points);
    if (emit_constant && rep.find_constant("bochner_constant") == nullptr) {
        // Here the certificate is CONSTANCY of the curvature invariant (a
        // Bochner-flat space yields any constant value); only the theorem
        // pipelines additionally require the value itself to vanish.
        ConstantSummary cs = fb.finalize(pts.empty() ? 1.0 : tau_sq_sum / pts.size());
        const double thr = pick_tol(cfg, "bochner_constant", kTheoremTol);
        rep.constants.push_back({"bochner_constant", cs.mean, cs.stddev, cs.max_abs, cs.scale,
                                 thr, cs.spread_normalized() < thr, cs.points});
    }
}

inline void add_constant(CertificationReport& rep, const RunConfig& cfg, const std::string& name,
                         const ConstantSummary& cs) {
    if (rep.find_constant(name) != nullptr) return;
    const double thr = pick_tol(cfg, name, kTheoremTol);
    rep.constants.push_back({name, cs.mean, cs.stddev, cs.max_abs, cs.scale, thr,
                             cs.mean_normalized() < thr && cs.spread_normalized() < thr &&
                                 cs.max_normalized() < thr,
                             cs.points});
}

inline void run_forward(const ManifoldSpec& spec, const std::vector<std::vector<double>>& pts,
                        const RunConfig& cfg, CertificationReport& rep, int threads) {
    TheoremReport tr = certify_forward(spec, pts, kTheoremTol, threads);
    for (const auto& [name, rs] : tr.residual_items()) {
        const bool identity_block = name.rfind("defining_", 0) == 0 ||
                                    name == "curvature_expansion" || name == "reduced_curvature";
        const double fallback = identity_block ? kIdentityTol : kTheoremTol;
        add_check(rep, "forward." + name, rs->max, rs->mean,
                  pick_tol(cfg, "forward." + name, fallback), rs->points);
    }
    CheckBlock sign;
    sign.name = "forward.tau_negative";
    sign.max = static_cast<double>(tr.tau_sign_violations);
    sign.mean = sign.max;
    sign.threshold = 1.0;  // any violating point fails
    sign.pass = tr.tau_sign_violations == 0;
    sign.points = tr.points_used + tr.tau_sign_violations;
    sign.note = "count of sampled points with tau >= 0 where the chain applies";
    rep.checks.push_back(sign);

    if (!tr.applicable) {
        rep.notes.push_back("theorem chain not applicable: " + tr.not_applicable_reason);
    } else {
        add_constant(rep, cfg, "bochner_constant", tr.bochner_constant);
        add_constant(rep, cfg, "b0_constant", tr.b0_constant);
        add_constant(rep, cfg, "a_plus_k2", tr.a_plus_k2);
        const ConstantBlock* ak2 = rep.find_constant("a_plus_k2");
        if (ak2 != nullptr) {
            if (std::abs(ak2->mean) / ak2->scale <= ak2->threshold)
                rep.class_label = "zero";
            else
                rep.class_label = ak2->mean > 0.0 ? "positive" : "negative";
        }
    }
    if (tr.points_degenerate > 0)
        rep.notes.push_back(std::to_string(tr.points_degenerate) +
                            " sampled point(s) lack the scalar frame and were excluded "
                            "from the theorem chain");
}

inline void run_inverse(const ManifoldSpec& spec, const std::vector<std::vector<double>>& pts,
                        const RunConfig& cfg, CertificationReport& rep, int threads) {
    InverseReport ir = certify_inverse(without_potential(spec), pts, kTheoremTol, threads);
    for (const auto& v : ir.preconditions) {
        CheckBlock block;
        block.name = "inverse." + v.name;
        block.max = v.value;
        block.mean = v.value;
        block.threshold = v.threshold;
        block.pass = v.pass;
        block.points = static_cast<int>(pts.size());
        block.note = v.note;
        rep.checks.push_back(block);
    }
    if (!ir.preconditions_pass) {
        rep.notes.push_back("inverse construction skipped: a hypothesis check failed");
        return;
    }
    const std::vector<std::pair<std::string, const ResidualSummary*>> items = {
        {"inverse.flat_curvature", &ir.flat_curvature},
        {"inverse.nabla_eta", &ir.nabla_eta},
        {"inverse.k_consistency", &ir.k_consistency},
        {"inverse.xi_tau", &ir.xi_tau}};
    for (const auto& [name, rs] : items)
        add_check(rep, name, rs->max, rs->mean, pick_tol(cfg, name, kTheoremTol), rs->points);
}

}  // namespace detail

/// Loads the configured spec (file or built-in model, plus an optional
/// potential override), samples it, runs the selected pipelines, and
/// assembles the report.  Throws ParseError/SpecError for unusable input
/// and the numerical error types for breakdown during evaluation.
inline CertificationReport run_certification(const RunConfig& cfg) {
    if (cfg.file.has_value() == cfg.model.has_value())
        throw SpecError("exactly one of a spec file or a built-in model must be given");
    ManifoldSpec spec;
    if (cfg.file) {
        std::ifstream in(*cfg.file);
        if (!in) throw SpecError("cannot open spec file '" + *cfg.file + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::parse_error& err) {
            throw ParseError(std::string("spec file is not valid JSON: ") + err.what(),
                             err.byte);
        }
        spec = manifold_spec_from_json(doc);
    } else {
        spec = builtin_model(*cfg.model, cfg.params);
    }
    if (cfg.potential) spec = with_potential(spec, *cfg.potential);

    if (cfg.pipeline != "validate" && cfg.pipeline != "bochner" &&
        cfg.pipeline != "theorem-forward" && cfg.pipeline != "theorem-inverse" &&
        cfg.pipeline != "all")
        throw SpecError("unknown pipeline '" + cfg.pipeline +
                        "' (expected validate, bochner, theorem-forward, theorem-inverse, "
                        "or all)");
    if (cfg.points < 1) throw SpecError("point count must be at least 1");
    if (cfg.pipeline == "theorem-forward" && !spec.has_potential())
        throw SpecError("pipeline theorem-forward needs a spec with a potential "
                        "(attach one with --potential)");

    const int threads = cfg.threads > 0 ? cfg.threads : certify_thread_count();
    const auto pts = sample_points(spec, cfg.points, cfg.seed);

    CertificationReport rep;
    rep.spec_name = spec.name;
    rep.spec_hash = fnv1a_hex(serialize_manifold_spec(spec));
    rep.dim = spec.dim;
    rep.n = spec.n();
    rep.pipeline = cfg.pipeline;
    rep.seed = cfg.seed;
    rep.points = cfg.points;

    const bool all = cfg.pipeline == "all";
    if (all || cfg.pipeline == "validate") detail::run_validate(spec, pts, cfg, rep);
    if (all || cfg.pipeline == "bochner")
        detail::run_bochner(spec, pts, cfg, rep, threads,
                            /*emit_constant=*/!(all && spec.has_potential()));
    if (cfg.pipeline == "theorem-forward" || (all && spec.has_potential()))
        detail::run_forward(spec, pts, cfg, rep, threads);
    else if (all && !spec.has_potential())
        rep.notes.push_back("forward pipeline skipped: the spec carries no potential");
    if (all || cfg.pipeline == "theorem-inverse") detail::run_inverse(spec, pts, cfg, rep, threads);

    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    for (const auto& c : rep.constants) rep.pass = rep.pass && c.pass;
    return rep;
}

// ----------------------------------------------------------------------------
// Rendering
// ----------------------------------------------------------------------------

inline nlohmann::json report_to_json(const CertificationReport& rep) {
    nlohmann::json doc;
    doc["spec"] = {{"name", rep.spec_name}, {"hash", rep.spec_hash}, {"dim", rep.dim},
                   {"n", rep.n}};
    doc["run"] = {{"pipeline", rep.pipeline}, {"seed", rep.seed}, {"points", rep.points}};
    doc["checks"] = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        nlohmann::json jc = {{"name", c.name},           {"max", c.max},
                             {"mean", c.mean},           {"threshold", c.threshold},
                             {"points", c.points},       {"verdict", c.pass ? "PASS" : "FAIL"}};
        if (!c.note.empty()) jc["note"] = c.note;
        doc["checks"].push_back(jc);
    }
    doc["constants"] = nlohmann::json::array();
    for (const auto& c : rep.constants)
        doc["constants"].push_back({{"name", c.name},
                                    {"mean", c.mean},
                                    {"spread", c.spread},
                                    {"max_abs", c.max_abs},
                                    {"scale", c.scale},
                                    {"threshold", c.threshold},
                                    {"points", c.points},
                                    {"verdict", c.pass ? "PASS" : "FAIL"}});
    doc["class"] = rep.class_label;
    doc["notes"] = rep.notes;
    doc["verdict"] = rep.pass ? "PASS" : "FAIL";
    return doc;
}

/// Parses a JSON report back into the structure (inverse of report_to_json).
inline CertificationReport parse_report(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("report is not valid JSON: ") + err.what(), err.byte);
    }
    CertificationReport rep;
    try {
        rep.spec_name = doc.at("spec").at("name").get<std::string>();
        rep.spec_hash = doc.at("spec").at("hash").get<std::string>();
        rep.dim = doc.at("spec").at("dim").get<int>();
        rep.n = doc.at("spec").at("n").get<int>();
        rep.pipeline = doc.at("run").at("pipeline").get<std::string>();
        rep.seed = doc.at("run").at("seed").get<std::uint64_t>();
        rep.points = doc.at("run").at("points").get<int>();
        for (const auto& jc : doc.at("checks")) {
            CheckBlock c;
            c.name = jc.at("name").get<std::string>();
            c.max = jc.at("max").get<double>();
            c.mean = jc.at("mean").get<double>();
            c.threshold = jc.at("threshold").get<double>();
            c.points = jc.at("points").get<int>();
            c.pass = jc.at("verdict").get<std::string>() == "PASS";
            if (jc.contains("note")) c.note = jc.at("note").get<std::string>();
            rep.checks.push_back(c);
        }
        for (const auto& jc : doc.at("constants")) {
            ConstantBlock c;
            c.name = jc.at("name").get<std::string>();
            c.mean = jc.at("mean").get<double>();
            c.spread = jc.at("spread").get<double>();
            c.max_abs = jc.at("max_abs").get<double>();
            c.scale = jc.at("scale").get<double>();
            c.threshold = jc.at("threshold").get<double>();
            c.points = jc.at("points").get<int>();
            c.pass = jc.at("verdict").get<std::string>() == "PASS";
            rep.constants.push_back(c);
        }
        rep.class_label = doc.at("class").get<std::string>();
        for (const auto& nj : doc.at("notes")) rep.notes.push_back(nj.get<std::string>());
        rep.pass = doc.at("verdict").get<std::string>() == "PASS";
    } catch (const nlohmann::json::exception& err) {
        throw SpecError(std::string("report JSON has the wrong shape: ") + err.what());
    }
    return rep;
}

/// Renders a report as pretty-printed JSON or as text with one line per
/// check.  Identical reports render to identical bytes.
inline std::string render_report(const CertificationReport& rep, const std::string& format) {
    if (format == "json") return report_to_json(rep).dump(2) + "\n";
    if (format != "text")
        throw SpecError("unknown report format '" + format + "' (expected text or json)");

    std::ostringstream out;
    out.setf(std::ios::scientific);
    out.precision(3);
    out << "certification report: " << rep.spec_name << " (dim " << rep.dim << ", n " << rep.n
        << ")\n";
    out << "spec hash : " << rep.spec_hash << "\n";
    out << "run       : pipeline=" << rep.pipeline << " seed=" << rep.seed
        << " points=" << rep.points << "\n";
    out << "checks:\n";
    for (const auto& c : rep.checks) {
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << "  max=" << c.max
            << "  mean=" << c.mean << "  threshold=" << c.threshold << "  points=" << c.points;
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << "\n";
    }
    if (!rep.constants.empty()) {
        out << "constants:\n";
        for (const auto& c : rep.constants)
            out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << "  mean=" << c.mean
                << "  spread=" << c.spread << "  scale=" << c.scale
                << "  threshold=" << c.threshold << "\n";
    }
    out << "class     : " << rep.class_label << "\n";
    for (const auto& nt : rep.notes) out << "note      : " << nt << "\n";
    out << "verdict   : " << (rep.pass ? "PASS" : "FAIL") << "\n";
    return out.str();
}

}  // namespace ccc
