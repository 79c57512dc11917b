#ifndef SHIFTPERT_EXPERIMENTS_HPP
#define SHIFTPERT_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shiftpert/measures.hpp"

namespace shiftpert {

enum class ScenarioKind {
    Analyze,
    Verify,               // randomized S_2 identity verification
    Sweep,                // t/p norm table
    CounterexampleIntegers,
    CounterexampleSharp3,
    Synthesize,
};

struct TargetAtom {
    double angle_over_pi;
    int multiplicity;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Analyze;
    std::vector<CircleMeasure> measures;       // one per block
    std::vector<double> t_grid;
    std::vector<double> p_list;
    std::vector<std::size_t> truncation_sweep;
    std::vector<std::size_t> n_sweep;          // integer-counterexample truncations
    double tolerance = 1e-8;
    std::uint64_t seed = 1;
    std::vector<TargetAtom> target;            // synthesize only
    double epsilon = 0.1;
    double q = 4.0;

    static ScenarioConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;  // throws std::invalid_argument on violated invariants
};

ScenarioKind scenario_kind_from_string(const std::string& s);
std::string to_string(ScenarioKind k);

struct ScenarioReport {
    bool ok = false;
    std::string report_json;               // serialized JSON document
    std::string spectra_csv;
    std::string bounds_csv;
    std::string growth_csv;
};

ScenarioReport run_analyze(const ScenarioConfig& cfg);
ScenarioReport run_verify_eq4(const ScenarioConfig& cfg);
ScenarioReport run_sweep(const ScenarioConfig& cfg);
ScenarioReport run_counterexample_integers(const ScenarioConfig& cfg);
ScenarioReport run_counterexample_sharp3(const ScenarioConfig& cfg);
ScenarioReport run_synthesize(const ScenarioConfig& cfg);
ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Writes report.json plus the non-empty CSV companions into out_dir
// (created if missing).
void write_report(const ScenarioReport& rep, const std::string& out_dir);

}  // namespace shiftpert

#endif
