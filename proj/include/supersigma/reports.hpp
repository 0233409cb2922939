#pragma once

/**
 * @file reports.hpp
 * @brief Suite configuration, verification checks and JSON reports behind
 * the command-line tool.
 *
 * Every check derives its fixtures from the configured seed, so a report is
 * a pure function of the configuration. Runtimes are recorded but only
 * serialized on request, which keeps reports byte-identical across runs.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supersigma/deformations.hpp"
#include "supersigma/sigma2d.hpp"

namespace supersigma {

struct SuiteConfig {
    std::uint64_t seed = 42;
    int generators = 6;  // Lambda_N for the algebra, integration, toy and reduction suites
    double period = kTwoPi;

    int circle_points = 64;
    int torus_points = 16;
    int reduction_points = 64;
    int flow_points = 32;
    int decompose_points = 16;
    std::vector<int> dimension_points{32, 64};

    int flow_steps = 5000;
    double flow_dt = 0.0015;
    int calibration_fixtures = 2;

    std::map<std::string, double> tolerances;  // per check family
    std::map<std::string, int> fixtures;       // fixture counts per family
    std::optional<Conventions> conventions;    // calibrated values when absent

    static SuiteConfig defaults();
    double tolerance(const std::string& family) const;
    int count(const std::string& family) const;
    Conventions active_conventions() const;
};

nlohmann::json to_json(const SuiteConfig& c);
// Missing keys take their defaults; unknown keys are rejected.
SuiteConfig config_from_json(const nlohmann::json& j);
SuiteConfig load_config(const std::string& path);
void validate(const SuiteConfig& c);
// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const SuiteConfig& c);

struct CheckReport {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;  // residual <= tolerance
    double runtime_ms = 0.0;
    std::string provenance;  // where the expected value comes from
    std::string error;       // set when the check threw
};

struct Report {
    std::uint64_t seed = 0;
    std::string config_hash;
    Conventions conventions;
    std::vector<CheckReport> checks;

    bool all_pass() const;
};

nlohmann::json to_json(const CheckReport& r, bool timings);
CheckReport check_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Report& r, bool timings = false);
Report report_from_json(const nlohmann::json& j);

// grassmann, berezin, toy, reduction, susy2d, currents, flow, decompose.
const std::vector<std::string>& suite_names();
// Runs one suite or "all"; throws ConfigError for unknown names.
Report run_suite(const SuiteConfig& config, const std::string& suite);

// Calibration over a gravitino battery of `calibration_fixtures` fixtures.
ConventionCalibration calibrate(const SuiteConfig& config);
// The config with the chosen conventions frozen into it.
SuiteConfig calibrated_config(const SuiteConfig& config);

struct DecomposeFixture {
    SurfaceGeometry geom;
    GravitinoField chi;
    std::optional<SymmetricTensor> metric;
    std::optional<GravitinoField> gravitino;
};

DecomposeFixture decompose_fixture_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecomposeFixture& f);
nlohmann::json to_json(const MetricDecomposition& d);
nlohmann::json to_json(const GravitinoDecomposition& d);

}  // namespace supersigma
