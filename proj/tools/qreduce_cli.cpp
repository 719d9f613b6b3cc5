// Scenario-driven front end for the reduction-dynamics laboratory.
//
// Exit codes: 0 success, 1 declared tolerance failed, 2 configuration error,
// 3 runtime error.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "qreduce/acceptance.hpp"
#include "qreduce/runner.hpp"
#include "qreduce/scenario.hpp"

namespace {

struct CommonOptions {
    std::string scenario_path;
    std::string out_dir = "out";
    unsigned threads = 1;
    std::string format = "both";
    bool has_seed_override = false;
    std::uint64_t seed_override = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--scenario", opt.scenario_path, "Scenario file (JSON)")
        ->required();
    cmd->add_option("--seed", opt.seed_override, "Override the scenario seed")
        ->each([&](const std::string&) { opt.has_seed_override = true; });
    cmd->add_option("--out", opt.out_dir, "Output directory (default: out)");
    cmd->add_option("--threads", opt.threads, "Worker threads for trajectory fan-out")
        ->check(CLI::Range(1u, 256u));
    cmd->add_option("--format", opt.format, "Outputs to write")
        ->check(CLI::IsMember({"csv", "json-summary", "both"}));
}

int run_kind(const CommonOptions& opt, qreduce::ScenarioKind kind) {
    using namespace qreduce;
    Scenario sc;
    try {
        sc = load_scenario(opt.scenario_path);
        if (sc.kind != kind) {
            std::fprintf(stderr, "error: scenario kind '%s' does not match subcommand\n",
                         to_string(sc.kind));
            return 2;
        }
        if (opt.has_seed_override) sc.seed = opt.seed_override;
    } catch (const Error& e) {
        // Anything wrong with the scenario itself is a configuration error.
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    RunOptions run_opt;
    run_opt.out_dir = opt.out_dir;
    run_opt.threads = opt.threads;
    run_opt.write_csv = opt.format != "json-summary";
    run_opt.write_summary = opt.format != "csv";

    try {
        const RunOutcome outcome = run_scenario(sc, run_opt);
        for (const auto& check : outcome.summary["checks"])
            std::printf("[%s] %s: %.10g (target %.10g +- %.3g)\n",
                        check["passed"].get<bool>() ? "ok" : "FAIL",
                        check["name"].get<std::string>().c_str(),
                        check["value"].get<double>(), check["target"].get<double>(),
                        check["tolerance"].get<double>());
        std::printf("%s: wrote %zu file(s) to %s\n",
                    outcome.passed ? "done" : "FAILED", outcome.files_written.size(),
                    opt.out_dir.c_str());
        return outcome.passed ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qreduce - martingale reduction dynamics laboratory"};
    app.require_subcommand(1);

    CommonOptions diffusion_opt, fp_opt, quantum_opt, mixture_opt, bridge_opt;
    auto* diffusion =
        app.add_subcommand("simulate-diffusion", "Monte Carlo simplex diffusion ensemble");
    add_common(diffusion, diffusion_opt);
    auto* fp = app.add_subcommand("solve-fp", "Fokker-Planck solve on the unit interval");
    add_common(fp, fp_opt);
    auto* quantum =
        app.add_subcommand("evolve-quantum", "Two-channel track-pattern evolution");
    add_common(quantum, quantum_opt);
    auto* mixture = app.add_subcommand("mixture", "Weighted ensemble statistics");
    add_common(mixture, mixture_opt);
    auto* bridge =
        app.add_subcommand("bridge", "Quantum fluctuations into a diffusion ensemble");
    add_common(bridge, bridge_opt);

    unsigned verify_threads = 1;
    auto* verify = app.add_subcommand("verify", "Run the full acceptance suite");
    verify->add_option("--threads", verify_threads, "Worker threads")
        ->check(CLI::Range(1u, 256u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (diffusion->parsed())
            return run_kind(diffusion_opt, qreduce::ScenarioKind::diffusion);
        if (fp->parsed()) return run_kind(fp_opt, qreduce::ScenarioKind::fokker_planck);
        if (quantum->parsed()) return run_kind(quantum_opt, qreduce::ScenarioKind::quantum);
        if (mixture->parsed()) return run_kind(mixture_opt, qreduce::ScenarioKind::mixture);
        if (bridge->parsed()) return run_kind(bridge_opt, qreduce::ScenarioKind::bridge);
        if (verify->parsed()) {
            const auto results = qreduce::acceptance::run_all(verify_threads);
            return qreduce::acceptance::print_and_check(results) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
