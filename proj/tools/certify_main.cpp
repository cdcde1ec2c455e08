// certify — load a manifold spec (file or built-in model), run the selected
// certification pipelines over seeded sample points, and emit a text or
// JSON report.
//
// Exit codes: 0 all enabled checks pass; 1 a certification verdict failed;
// 2 unusable input (bad flags, malformed spec, unknown model); 3 numerical
// breakdown during evaluation (singular metric, domain violation, vanishing
// scalar field where a pipeline required it).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccc/models.hpp"
#include "ccc/report.hpp"

namespace {

std::pair<std::string, double> parse_assignment(const std::string& text,
                                                const std::string& flag) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ccc::SpecError(flag + " expects name=value, got '" + text + "'");
    const std::string name = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return {name, v};
    } catch (const std::exception&) {
        throw ccc::SpecError(flag + " value for '" + name + "' is not a number: '" + value +
                             "'");
    }
}

int write_output(const std::string& text, const std::optional<std::string>& path) {
    if (!path) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(*path);
    if (!out) {
        std::cerr << "error: cannot write '" << *path << "'\n";
        return 2;
    }
    out << text;
    return 0;
}

int run_list_models() {
    for (const auto& m : ccc::model_catalog()) {
        std::cout << m.name << "\n  " << m.summary << "\n";
        for (const auto& p : m.params)
            std::cout << "  --param " << p.name << "=<value>  (default " << p.default_value
                      << ") " << p.doc << "\n";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "certify: numerically certify the flat-complex-conformal-connection "
        "characterization on a Kahler manifold spec"};
    app.require_subcommand(0, 1);

    std::optional<std::string> model, file, potential, out_path;
    std::vector<std::string> param_args, tol_args;
    std::string pipeline = "all", format = "text";
    int points = 100;
    std::uint64_t seed = 7;

    app.add_option("--model", model, "built-in model name (see list-models)");
    app.add_option("--file", file, "path to a manifold spec JSON file");
    app.add_option("--param", param_args, "model parameter, name=value (repeatable)");
    app.add_option("--potential", potential,
                   "scalar potential expression to attach (overrides the spec's)");
    app.add_option("--pipeline", pipeline,
                   "validate | bochner | theorem-forward | theorem-inverse | all");
    app.add_option("--points", points, "number of sample points")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--tol", tol_args, "threshold override, check-name=value (repeatable)");
    app.add_option("--format", format, "report format: text | json");
    app.add_option("--out", out_path, "write the report to this path instead of stdout");

    CLI::App* list_cmd = app.add_subcommand("list-models", "list built-in models and params");
    CLI::App* emit_cmd =
        app.add_subcommand("emit-spec", "write a built-in model's spec JSON and exit");
    list_cmd->fallthrough();
    emit_cmd->fallthrough();  // lets emit-spec reuse --model/--param/--out

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (list_cmd->parsed()) return run_list_models();

        std::map<std::string, double> params;
        for (const auto& a : param_args) params.insert(parse_assignment(a, "--param"));

        if (emit_cmd->parsed()) {
            if (!model) throw ccc::SpecError("emit-spec needs --model");
            ccc::ManifoldSpec spec = ccc::builtin_model(*model, params);
            if (potential) spec = ccc::with_potential(spec, *potential);
            return write_output(ccc::serialize_manifold_spec(spec) + "\n", out_path);
        }

        ccc::RunConfig cfg;
        cfg.file = file;
        cfg.model = model;
        cfg.params = params;
        cfg.potential = potential;
        cfg.pipeline = pipeline;
        cfg.points = points;
        cfg.seed = seed;
        for (const auto& a : tol_args) cfg.tol.insert(parse_assignment(a, "--tol"));

        ccc::CertificationReport rep = ccc::run_certification(cfg);
        const int io = write_output(ccc::render_report(rep, format), out_path);
        if (io != 0) return io;
        return rep.pass ? 0 : 1;
    } catch (const ccc::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ccc::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ccc::Error& e) {
        // Numerical breakdown: singular metric, domain violation, vanishing
        // fields where a pipeline required them.
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
