// Acceptance harness: exercises the certification stack end to end and
// prints exactly one verdict line per criterion.  Exits nonzero when any
// criterion fails, so the suite can gate on it.
//
// Criteria (desk scale: dimension 6, <= 200 points, whole run in seconds):
//   1. flat control: every curvature object vanishes to 1e-12; the
//      conformal connection of the zero potential is flat to 1e-12.
//   2. space-form control: Ricci = -8 g, scalar = -48, trace-free part of
//      the curvature zero, all to 1e-8 relative at 100 seeded points.
//   3. the curvature expansion of the conformal connection holds for every
//      (model, potential) pair tried, to 1e-8 relative.
//   4. forward certification of the warped model with its logarithmic
//      potential: all chain residuals < 1e-6, all constants zero to 1e-6.
//   5. inverse certification of the warped model with the potential
//      stripped: hypotheses certified, constructed connection flat < 1e-6.
//   6. closed-form specializations in complex dimension 3 (norm of the
//      scalar gradient, Laplacian, Ricci norm, slope values) < 1e-6.
//   7. negative controls through the CLI: three runs that must fail with
//      exit code 1, one of them naming the vanishing scalar gradient.
//   8. differentiation oracle: exact metric partials (orders 1-2) match
//      central finite differences to 1e-4 relative.
//   9. determinism: two identical CLI invocations emit byte-identical JSON.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

#include "ccc/bochner.hpp"
#include "ccc/conformal.hpp"
#include "ccc/distribution.hpp"
#include "ccc/levi_civita.hpp"
#include "ccc/manifold.hpp"
#include "ccc/models.hpp"

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& label, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("criterion %d [%s] %s (%s)\n", id, pass ? "PASS" : "FAIL", label.c_str(),
                detail.c_str());
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double rel(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

/// Runs the certification CLI with the given arguments, capturing combined
/// stdout+stderr and the process exit code.
CliResult run_cli(const std::string& args, const std::string& tag) {
    const std::string path = std::string("/tmp/ccc_acceptance_") + tag + ".out";
    const std::string cmd = std::string(CERTIFY_BIN) + " " + args + " > " + path + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
#ifdef __unix__
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    r.exit_code = status;
#endif
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    std::remove(path.c_str());
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------------------------------------------------------

void criterion_1_flat_control() {
    const ccc::ManifoldSpec spec = ccc::builtin_model("flat", {});
    const ccc::ManifoldSpec with_u0 = ccc::with_potential(spec, "0");
    const auto pts = ccc::sample_points(spec, 5, 7);
    double worst = 0.0;
    for (const auto& p : pts) {
        ccc::CurvatureBundle b = ccc::curvature_bundle(spec, p);
        for (double v : b.gamma) worst = std::max(worst, std::abs(v));
        for (double v : b.riemann_up) worst = std::max(worst, std::abs(v));
        for (double v : b.ricci) worst = std::max(worst, std::abs(v));
        worst = std::max(worst, std::abs(b.tau));
        worst = std::max(worst, ccc::bochner_data(spec, p).bochner_flat_residual);
        worst = std::max(worst, ccc::conformal_data(with_u0, p).curvature.max_abs());
    }
    verdict(1, worst < 1e-12, "flat control: all curvature objects vanish",
            "worst " + num(worst) + " vs 1e-12");
}

void criterion_2_space_form_control() {
    const ccc::ManifoldSpec spec = ccc::builtin_model("space_form", {{"c", -4.0}});
    const auto pts = ccc::sample_points(spec, 100, 7);
    double worst = 0.0;
    for (const auto& p : pts) {
        ccc::CurvatureBundle b = ccc::curvature_bundle(spec, p);
        ccc::MetricFrame f = ccc::metric_frame(spec, p);
        double rho_scale = 1.0;
        for (double v : b.ricci) rho_scale = std::max(rho_scale, std::abs(v));
        for (int i = 0; i < b.dim; ++i)
            for (int j = 0; j < b.dim; ++j)
                worst = std::max(worst,
                                 std::abs(b.ricci_at(i, j) + 8.0 * f.g_at(i, j)) / rho_scale);
        worst = std::max(worst, rel(b.tau, -48.0));
        worst = std::max(worst, ccc::bochner_data(spec, p).bochner_flat_residual);
    }
    verdict(2, worst < 1e-8, "space-form control: Ricci = -8g, scalar = -48, trace-free",
            "worst " + num(worst) + " vs 1e-8 at 100 points");
}

void criterion_3_expansion_universal() {
    const std::vector<std::string> models = {"flat", "space_form", "warped_type9"};
    const std::vector<std::string> potentials = {"0.1*x1", "0.05*sin(x1)"};
    double worst = 0.0;
    int combos = 0;
    for (const auto& m : models) {
        const ccc::ManifoldSpec base = ccc::builtin_model(m, {});
        for (const auto& u : potentials) {
            const ccc::ManifoldSpec spec = ccc::with_potential(base, u);
            for (const auto& p : ccc::sample_points(spec, 20, 11)) {
                ccc::ConnectionRelations r =
                    ccc::relation_residuals(ccc::conformal_data(spec, p));
                worst = std::max(worst, r.curvature_identity);
            }
            ++combos;
        }
    }
    verdict(3, worst < 1e-8 && combos == 6,
            "curvature expansion holds for every model and potential",
            "worst " + num(worst) + " vs 1e-8 over 6 combinations x 20 points");
}

void criterion_4_forward() {
    const ccc::ManifoldSpec spec = ccc::builtin_model("warped_type9", {});
    const auto pts = ccc::sample_points(spec, 100, 7);
    ccc::TheoremReport rep = ccc::certify_forward(spec, pts, 1e-6);
    double worst_res = 0.0;
    for (const auto& [name, rs] : rep.residual_items()) worst_res = std::max(worst_res, rs->max);
    double worst_const = 0.0;
    for (const auto& [name, cs] : rep.constant_items()) {
        worst_const = std::max(worst_const, cs->mean_normalized());
        worst_const = std::max(worst_const, cs->spread_normalized());
    }
    verdict(4, rep.pass && rep.applicable && worst_res < 1e-6 && worst_const < 1e-6,
            "forward certification of the warped model",
            "chain " + num(worst_res) + ", constants " + num(worst_const) +
                " vs 1e-6 at 100 points");
}

void criterion_5_inverse() {
    const ccc::ManifoldSpec spec =
        ccc::without_potential(ccc::builtin_model("warped_type9", {}));
    const auto pts = ccc::sample_points(spec, 100, 7);
    ccc::InverseReport rep = ccc::certify_inverse(spec, pts, 1e-6);
    verdict(5, rep.pass && rep.preconditions_pass && rep.flat_curvature.max < 1e-6,
            "inverse certification constructs a flat connection",
            "hypotheses " + std::string(rep.preconditions_pass ? "certified" : "REJECTED") +
                ", flatness " + num(rep.flat_curvature.max) + " vs 1e-6 at 100 points");
}

void criterion_6_specializations() {
    const ccc::ManifoldSpec spec = ccc::builtin_model("warped_type9", {});
    double worst = 0.0;
    for (const auto& p : ccc::sample_points(spec, 25, 5)) {
        ccc::CurvatureBundle b = ccc::curvature_bundle(spec, p);
        const double tau = b.tau;
        worst = std::max(worst, rel(b.dtau_norm_sq, -tau * tau * tau / 20.0));
        worst = std::max(worst, rel(b.laplace_tau, -tau * tau / 4.0));
        worst = std::max(worst, rel(b.ricci_norm_sq, 3.0 * tau * tau / 16.0));
        ccc::B0Data d = ccc::b0_residuals(spec, p);
        const double root = std::sqrt(-tau / 20.0);
        worst = std::max(worst, rel(d.k, -root));
        worst = std::max(worst, rel(d.p_star, 1.5 * root));
    }
    verdict(6, worst < 1e-6, "closed-form specializations in complex dimension 3",
            "worst " + num(worst) + " vs 1e-6 at 25 points");
}

void criterion_7_negative_controls() {
    CliResult pert =
        run_cli("--model perturbed_flat --pipeline bochner --points 20 --seed 7", "pert");
    CliResult lin = run_cli(
        "--model flat --potential 0.3*x1 --pipeline theorem-forward --points 20 --seed 7",
        "lin");
    CliResult sf =
        run_cli("--model space_form --pipeline theorem-inverse --points 20 --seed 7", "sf");
    const bool reason = sf.output.find("dtau vanishes") != std::string::npos;
    const bool pass = pert.exit_code == 1 && lin.exit_code == 1 && sf.exit_code == 1 && reason;
    std::string detail = "exit codes " + std::to_string(pert.exit_code) + "/" +
                         std::to_string(lin.exit_code) + "/" + std::to_string(sf.exit_code) +
                         " (want 1/1/1), vanishing-gradient reason " +
                         (reason ? "reported" : "MISSING");
    verdict(7, pass, "negative controls fail through the CLI", detail);
}

void criterion_8_fd_oracle() {
    const double h = 1e-5;
    double worst = 0.0;
    for (const char* name : {"flat", "space_form", "warped_type9", "perturbed_flat"}) {
        const ccc::ManifoldSpec spec = ccc::builtin_model(name, {});
        const int d = spec.dim;
        for (const auto& p : ccc::sample_points(spec, 10, 13)) {
            for (const auto& comp : spec.metric) {
                ccc::Jet j = ccc::jet(comp, p, 2);
                std::vector<double> q(p.begin(), p.end());
                for (int i = 0; i < d; ++i) {
                    const double pi = q[static_cast<std::size_t>(i)];
                    q[static_cast<std::size_t>(i)] = pi + h;
                    const double up = comp.eval(q);
                    q[static_cast<std::size_t>(i)] = pi - h;
                    const double dn = comp.eval(q);
                    q[static_cast<std::size_t>(i)] = pi;
                    const double mid = comp.eval(q);
                    worst = std::max(worst, rel(j.first(i), (up - dn) / (2.0 * h)));
                    std::vector<int> alpha(static_cast<std::size_t>(d), 0);
                    alpha[static_cast<std::size_t>(i)] = 2;
                    worst = std::max(worst,
                                     rel(j.derivative(alpha), (up - 2.0 * mid + dn) / (h * h)));
                }
            }
        }
    }
    verdict(8, worst < 1e-4, "exact metric partials match central differences",
            "worst " + num(worst) + " vs 1e-4, step 1e-5, orders 1-2, 10 points per model");
}

void criterion_9_determinism() {
    const std::string base =
        "--model warped_type9 --pipeline all --points 25 --seed 11 --format json";
    CliResult a = run_cli(base + " --out /tmp/ccc_acceptance_det_a.json", "det_a");
    CliResult b = run_cli(base + " --out /tmp/ccc_acceptance_det_b.json", "det_b");
    const std::string ja = read_file("/tmp/ccc_acceptance_det_a.json");
    const std::string jb = read_file("/tmp/ccc_acceptance_det_b.json");
    std::remove("/tmp/ccc_acceptance_det_a.json");
    std::remove("/tmp/ccc_acceptance_det_b.json");
    const bool pass =
        a.exit_code == 0 && b.exit_code == 0 && !ja.empty() && ja == jb;
    verdict(9, pass, "identical CLI invocations emit byte-identical JSON",
            std::to_string(ja.size()) + " bytes, exit codes " + std::to_string(a.exit_code) +
                "/" + std::to_string(b.exit_code));
}

}  // namespace

int main() {
    criterion_1_flat_control();
    criterion_2_space_form_control();
    criterion_3_expansion_universal();
    criterion_4_forward();
    criterion_5_inverse();
    criterion_6_specializations();
    criterion_7_negative_controls();
    criterion_8_fd_oracle();
    criterion_9_determinism();
    if (failures > 0) {
        std::printf("acceptance: %d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
}
