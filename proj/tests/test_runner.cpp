#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qreduce/runner.hpp"
#include "qreduce/scenario.hpp"

using namespace qreduce;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("qreduce-test-" + tag);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Minimal structural validation against the published summary schema:
/// every required key exists and has the declared JSON type.
void check_against_schema(const json& schema, const json& doc) {
    REQUIRE(schema.contains("required"));
    for (const auto& key : schema["required"]) {
        const std::string name = key.get<std::string>();
        INFO("required key: " << name);
        REQUIRE(doc.contains(name));
    }
    for (const auto& [name, prop] : schema["properties"].items()) {
        if (!doc.contains(name)) continue;
        const std::string type = prop["type"].get<std::string>();
        const json& v = doc[name];
        INFO("key " << name << " should be " << type);
        if (type == "string") REQUIRE(v.is_string());
        if (type == "integer") REQUIRE(v.is_number_integer());
        if (type == "number") REQUIRE(v.is_number());
        if (type == "boolean") REQUIRE(v.is_boolean());
        if (type == "array") REQUIRE(v.is_array());
        if (type == "object") REQUIRE(v.is_object());
    }
}

const char* kDiffusionScenario = R"({
    "kind": "diffusion",
    "seed": 42,
    "diffusion": {
        "p0": [0.3, 0.7],
        "model": {"kind": "constant", "value": 1.0},
        "n_trajectories": 500,
        "dt": 1e-3,
        "t_max": 50.0,
        "expect": {"frequencies": [0.3, 0.7], "n_sigma": 5.0}
    }
})";

} // namespace

TEST_CASE("identical runs produce byte-identical outputs") {
    const Scenario sc = parse_scenario(kDiffusionScenario);
    const fs::path dir_a = fresh_dir("det-a");
    const fs::path dir_b = fresh_dir("det-b");
    const RunOutcome a = run_scenario(sc, {dir_a, 1, true, true});
    const RunOutcome b = run_scenario(sc, {dir_b, 2, true, true});
    REQUIRE(a.files_written == b.files_written);
    for (const auto& name : a.files_written)
        REQUIRE(slurp(dir_a / name) == slurp(dir_b / name));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("diffusion summaries carry the born statistics and pass checks") {
    const Scenario sc = parse_scenario(kDiffusionScenario);
    const fs::path dir = fresh_dir("diffusion");
    const RunOutcome outcome = run_scenario(sc, {dir, 2, true, true});
    REQUIRE(outcome.passed);
    REQUIRE(outcome.summary["results"]["n_completed"].get<std::size_t>() == 500);
    REQUIRE(outcome.summary["checks"].size() == 2);
    REQUIRE(fs::exists(dir / "trajectories.csv"));
    const std::string csv = slurp(dir / "trajectories.csv");
    REQUIRE(csv.rfind("trajectory_id,winner,hitting_time,steps", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("fokker-planck summaries report the absorbed split") {
    const std::string text = R"({
        "kind": "fokker-planck",
        "seed": 7,
        "fokker-planck": {
            "a": 1.0, "x0": 0.3, "t_end": 5.0, "dt": 1e-3,
            "expect": {"absorbed": [0.7, 0.3], "tol": 1e-3}
        }
    })";
    const Scenario sc = parse_scenario(text);
    const fs::path dir = fresh_dir("fp");
    const RunOutcome outcome = run_scenario(sc, {dir, 1, true, true});
    REQUIRE(outcome.passed);
    const auto& results = outcome.summary["results"];
    REQUIRE(results["absorbed_mass_1"].get<double>() == Catch::Approx(0.3).margin(1e-3));
    REQUIRE(results["spectral"]["survival_decay_rate"].get<double>() ==
            Catch::Approx(4.9348).epsilon(0.02));
    REQUIRE(results["spectral"]["exact_mean_hitting_time"].get<double>() ==
            Catch::Approx(0.21));
    REQUIRE(fs::exists(dir / "density.csv"));
    REQUIRE(fs::exists(dir / "absorbed.csv"));
    fs::remove_all(dir);
}

TEST_CASE("quantum summaries evaluate declared oracles") {
    const std::string text = R"({
        "kind": "quantum",
        "seed": 1,
        "quantum": {
            "grid": {"x_min": -24.0, "x_max": 24.0, "n_points": 512},
            "initial": {"c1": [1.0, 0.0], "c2": [0.0, 0.0],
                        "packet": {"width": 1.0}},
            "potential": {"kind": "harmonic", "omega": 1.0},
            "lambda_x": {"kind": "constant", "value": 0.5},
            "dt": 1e-3,
            "n_steps": 1000,
            "record_every": 10,
            "expect": {"rabi_tol": 1e-6}
        }
    })";
    const Scenario sc = parse_scenario(text);
    const fs::path dir = fresh_dir("quantum");
    const RunOutcome outcome = run_scenario(sc, {dir, 1, true, true});
    REQUIRE(outcome.passed);
    REQUIRE(outcome.summary["results"]["max_norm_drift"].get<double>() < 1e-8);
    REQUIRE(fs::exists(dir / "norms.csv"));
    fs::remove_all(dir);
}

TEST_CASE("failed declared tolerances mark the run as failed") {
    const std::string text = R"({
        "kind": "diffusion",
        "seed": 11,
        "diffusion": {
            "p0": [0.3, 0.7],
            "model": {"kind": "constant", "value": 1.0},
            "n_trajectories": 400,
            "dt": 1e-3,
            "t_max": 50.0,
            "expect": {"mean_hitting_time": 10.0, "rel_tol": 0.01}
        }
    })";
    const Scenario sc = parse_scenario(text);
    const fs::path dir = fresh_dir("fail");
    const RunOutcome outcome = run_scenario(sc, {dir, 1, false, true});
    REQUIRE_FALSE(outcome.passed);
    REQUIRE_FALSE(outcome.summary["passed"].get<bool>());
    fs::remove_all(dir);
}

TEST_CASE("summaries validate against the published schema") {
    const fs::path schema_path =
        fs::path(QREDUCE_SOURCE_DIR) / "docs" / "summary.schema.json";
    const json schema = json::parse(slurp(schema_path));

    const Scenario sc = parse_scenario(kDiffusionScenario);
    const fs::path dir = fresh_dir("schema");
    const RunOutcome outcome = run_scenario(sc, {dir, 1, false, true});
    const json summary = json::parse(slurp(dir / "summary.json"));
    check_against_schema(schema, summary);
    REQUIRE(summary == outcome.summary);
    fs::remove_all(dir);
}

TEST_CASE("bridge runs close the loop from quantum fluctuations to born statistics") {
    const std::string text = R"({
        "kind": "bridge",
        "seed": 9,
        "bridge": {
            "quantum": {
                "grid": {"x_min": -16.0, "x_max": 16.0, "n_points": 256},
                "initial": {"c1": [0.7745966692414834, 0.0],
                            "c2": [0.0, 0.6324555320336759],
                            "packet": {"width": 1.0}},
                "potential": {"kind": "harmonic", "omega": 1.0},
                "lambda_x": {"kind": "linear", "offset": 0.5, "slope": 0.2},
                "dt": 2e-3,
                "n_steps": 1500
            },
            "window": 15,
            "ensemble": {"n_trajectories": 4000},
            "expect": {"born_sigma": 4.0}
        }
    })";
    const Scenario sc = parse_scenario(text);
    const fs::path dir = fresh_dir("bridge");
    const RunOutcome outcome = run_scenario(sc, {dir, 2, true, true});
    REQUIRE(outcome.summary["results"]["estimated_a12"].get<double>() > 0.0);
    REQUIRE(outcome.passed);
    fs::remove_all(dir);
}

TEST_CASE("mixture runs combine component statistics") {
    const std::string text = R"({
        "kind": "mixture",
        "seed": 21,
        "mixture": {
            "components": [
                {"weight": 0.25,
                 "synthetic": {"p0": [0.5, 0.5],
                               "model": {"kind": "constant", "value": 1.0},
                               "dt": 1e-6, "n_samples": 20001}},
                {"weight": 0.75,
                 "synthetic": {"p0": [0.5, 0.5],
                               "model": {"kind": "constant", "value": 1.0},
                               "dt": 1e-6, "n_samples": 20001}}
            ],
            "variance_dt": 1e-5,
            "expect": {"pooled_rel_tol": 0.02}
        }
    })";
    const Scenario sc = parse_scenario(text);
    const fs::path dir = fresh_dir("mixture");
    const RunOutcome outcome = run_scenario(sc, {dir, 1, true, true});
    REQUIRE(outcome.passed);
    const auto combined = outcome.summary["results"]["combined_variance"];
    REQUIRE(combined[0].get<double>() == Catch::Approx(1e-5).epsilon(0.15));
    REQUIRE(fs::exists(dir / "combined.csv"));
    REQUIRE(fs::exists(dir / "component_00.csv"));
    fs::remove_all(dir);
}
