#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "supersigma/errors.hpp"
#include "supersigma/reports.hpp"

using namespace supersigma;

namespace {

constexpr const char* kConfigEnv = "SUPERSIGMA_CONFIG";

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string json_path;
    bool timings = false;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, std::string("Config file (default: $") + kConfigEnv + ")");
    app->add_option("--seed", c.seed, "Override the random seed");
    app->add_option("--json", c.json_path, "Write the JSON report to this file");
    app->add_flag("--timings", c.timings, "Include per-check runtimes in the JSON report");
}

std::string config_path(const Common& c) {
    if (!c.config_path.empty()) return c.config_path;
    if (const char* env = std::getenv(kConfigEnv)) return env;
    return {};
}

SuiteConfig load(const Common& c) {
    std::string path = config_path(c);
    SuiteConfig cfg = path.empty() ? SuiteConfig::defaults() : load_config(path);
    if (c.seed) cfg.seed = *c.seed;
    return cfg;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

std::string format_residual(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r);
    return buf;
}

int emit(const Report& r, const Common& c) {
    std::size_t passed = 0;
    for (const auto& check : r.checks) {
        passed += check.pass;
        std::cout << (check.pass ? "PASS  " : "FAIL  ") << check.name << "  residual=" << format_residual(check.residual)
                  << "  tol=" << format_residual(check.tolerance);
        if (!check.error.empty()) std::cout << "  error: " << check.error;
        std::cout << "\n";
    }
    std::cout << passed << "/" << r.checks.size() << " checks passed (seed " << r.seed << ", config " << r.config_hash
              << ")\n";
    if (!c.json_path.empty()) write_json(c.json_path, to_json(r, c.timings));
    return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification harness for the supersymmetric sigma model library"};
    app.require_subcommand(1);

    Common verify_opts, calib_opts, flow_opts, decomp_opts, current_opts;

    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", suite, "Suite name or 'all'")->required();
    add_common(verify, verify_opts);

    std::string calib_out;
    auto* calib = app.add_subcommand("calibrate", "Fix the sign conventions and store them in the config");
    add_common(calib, calib_opts);
    calib->add_option("--out", calib_out, "Write the updated config here instead of back to --config");

    std::optional<int> steps;
    std::optional<double> dt;
    auto* flow = app.add_subcommand("flow", "Run the harmonic map flow checks");
    add_common(flow, flow_opts);
    flow->add_option("--steps", steps, "Maximum number of steps")->check(CLI::PositiveNumber);
    flow->add_option("--dt", dt, "Time step")->check(CLI::PositiveNumber);

    std::string fixture;
    auto* decomp = app.add_subcommand("decompose", "Decompose deformations of metric and gravitino");
    add_common(decomp, decomp_opts);
    decomp->add_option("--fixture", fixture, "Fixture JSON; without it the seeded decomposition checks run");

    auto* currents = app.add_subcommand("currents", "Energy-momentum tensor and super current checks");
    add_common(currents, current_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) return emit(run_suite(load(verify_opts), suite), verify_opts);
        if (*currents) return emit(run_suite(load(current_opts), "currents"), current_opts);
        if (*flow) {
            SuiteConfig cfg = load(flow_opts);
            if (steps) cfg.flow_steps = *steps;
            if (dt) cfg.flow_dt = *dt;
            return emit(run_suite(cfg, "flow"), flow_opts);
        }
        if (*calib) {
            SuiteConfig cfg = load(calib_opts);
            ConventionCalibration c = calibrate(cfg);
            cfg.conventions = c.chosen;
            std::cerr << "calibration residual " << format_residual(c.residual) << ", best rejected "
                      << format_residual(c.runner_up) << "\n";
            std::string target = calib_out.empty() ? config_path(calib_opts) : calib_out;
            write_json(target, to_json(cfg));
            return 0;
        }
        if (*decomp) {
            if (fixture.empty()) return emit(run_suite(load(decomp_opts), "decompose"), decomp_opts);
            SuiteConfig cfg = load(decomp_opts);
            std::ifstream in(fixture);
            if (!in) throw ConfigError("cannot read fixture " + fixture);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("cannot parse " + fixture + ": " + e.what());
            }
            DecomposeFixture f = decompose_fixture_from_json(j);
            Conventions conv = cfg.active_conventions();
            double tol = cfg.tolerance("decompose");
            nlohmann::json out = nlohmann::json::object();
            bool ok = true;
            if (f.metric) {
                MetricDecomposition d = decompose_metric(f.geom, f.chi, *f.metric, conv);
                ok = ok && d.reassembly <= tol && d.trace <= tol && d.divergence <= tol;
                out["metric"] = to_json(d);
            }
            if (f.gravitino) {
                GravitinoDecomposition d = decompose_gravitino(f.geom, f.chi, *f.gravitino, conv);
                ok = ok && d.reassembly <= tol && d.gamma_trace <= tol && d.divergence <= tol;
                out["gravitino"] = to_json(d);
            }
            write_json(decomp_opts.json_path, out);
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
