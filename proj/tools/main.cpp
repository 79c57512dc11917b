#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shiftpert/experiments.hpp"

namespace {

using shiftpert::ScenarioConfig;
using shiftpert::ScenarioKind;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    double tol = 0.0;  // 0 = keep config/default
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* app, CommonFlags& flags) {
    app->add_option("--config", flags.config_path, "Scenario config JSON file");
    app->add_option("--out", flags.out_dir, "Output directory");
    app->add_option("--tol", flags.tol, "Tolerance override");
    app->add_option("--seed", flags.seed, "Seed for randomized suites")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
}

ScenarioConfig load_config(const CommonFlags& flags, ScenarioKind kind) {
    ScenarioConfig cfg;
    if (!flags.config_path.empty()) {
        std::ifstream f(flags.config_path);
        if (!f) throw std::runtime_error("cannot open config file: " + flags.config_path);
        nlohmann::json j;
        f >> j;
        cfg = ScenarioConfig::from_json(j);
    }
    cfg.kind = kind;
    if (flags.tol > 0.0) cfg.tolerance = flags.tol;
    if (flags.seed_set) cfg.seed = flags.seed;
    return cfg;
}

int run(const CommonFlags& flags, ScenarioKind kind,
        void (*tweak)(ScenarioConfig&) = nullptr) {
    ScenarioConfig cfg = load_config(flags, kind);
    if (tweak) tweak(cfg);
    shiftpert::ScenarioReport rep = shiftpert::run_scenario(cfg);
    shiftpert::write_report(rep, flags.out_dir);
    std::cout << to_string(kind) << ": " << (rep.ok ? "ok" : "FAILED") << " (report in "
              << flags.out_dir << ")\n";
    return rep.ok ? 0 : 1;
}

// default demo measure for analyze/sweep without a config: one atom at -1
void ensure_measure(ScenarioConfig& cfg) {
    if (cfg.measures.empty())
        cfg.measures.push_back(shiftpert::CircleMeasure::from_angles({{1.0, 1.0}}));
    if (cfg.t_grid.empty()) cfg.t_grid = {0.5, 1.0, 2.0};
    if (cfg.p_list.empty())
        cfg.p_list = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    if (cfg.truncation_sweep.empty()) cfg.truncation_sweep = {64, 128, 256};
}

void ensure_target(ScenarioConfig& cfg) {
    if (cfg.target.empty()) cfg.target = {{1.0, 2}, {0.5, 1}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schatten-class shift perturbations from atomic Clark measures"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* analyze = app.add_subcommand("analyze", "Full model analysis over the t/p grids");
    auto* verify = app.add_subcommand("verify-eq4", "Randomized exact S_2 identity check");
    auto* sweep = app.add_subcommand("sweep", "Norm table over the t/p grids");
    auto* counter = app.add_subcommand("counterexample", "Divergence counterexamples");
    std::string which;
    counter->add_option("which", which, "integers | sharp3")->required();
    auto* synth = app.add_subcommand("synthesize", "Spectrum synthesizer with a trace-norm budget");
    for (auto* sub : {analyze, verify, sweep, counter, synth}) add_common(sub, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run(flags, ScenarioKind::Analyze, ensure_measure);
        if (verify->parsed()) return run(flags, ScenarioKind::Verify);
        if (sweep->parsed()) return run(flags, ScenarioKind::Sweep, ensure_measure);
        if (counter->parsed()) {
            if (which == "integers") return run(flags, ScenarioKind::CounterexampleIntegers);
            if (which == "sharp3") return run(flags, ScenarioKind::CounterexampleSharp3);
            std::cerr << "unknown counterexample \"" << which << "\" (integers | sharp3)\n";
            return 2;
        }
        if (synth->parsed()) return run(flags, ScenarioKind::Synthesize, ensure_target);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
