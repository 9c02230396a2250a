#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtsched/engine.hpp"

namespace rtsched {

// A scenario file describes one experiment sweep: a graph, a traffic process,
// an admission scheme whose base ratio may sweep over a list or range (with
// optional per-link offsets for couplings like p2 = p1 + 0.001), the
// schedulers to compare, and the run parameters.
struct Scenario {
  std::string name;
  std::string description;
  MaximalScheduleFamily family;
  TrafficProcess traffic;
  AdmissionScheme::Kind admission_kind = AdmissionScheme::Kind::deterministic;
  std::vector<double> p_values;   // base delivery-ratio sweep
  std::vector<double> p_offsets;  // per-link, added to the base
  std::vector<PolicyKind> schedulers;
  std::int64_t horizon = 1;
  std::vector<std::uint64_t> seeds;
  int sample_every = 100;
};

// Strict parser: unknown keys anywhere in the document are rejected.
Scenario parse_scenario(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

// Built-in scenarios, addressable by name everywhere a scenario path is
// accepted.
std::vector<std::pair<std::string, std::string>> builtin_scenarios();  // name, description
bool is_builtin_scenario(const std::string& name);
nlohmann::json builtin_scenario_json(const std::string& name);

// Resolves a built-in name or reads a file; applies `key=value` overrides
// (dotted paths into the document) before parsing.
Scenario load_scenario(const std::string& path_or_builtin,
                       const std::vector<std::string>& overrides = {});

// Per-link admission ratios for one sweep point.
std::vector<double> admission_ratios(const Scenario& scenario, double base_p);

// The (p, scheduler, seed) cross product, in CSV row order.
std::vector<RunConfig> build_runs(const Scenario& scenario);

// CSV schema, one row per run:
//   scenario,scheduler,seed,p,delivery_ratio,mean_deficit,final_total_deficit,
//   slope,stable,T
// Per-link fields are ';'-joined; floats carry 9 significant digits.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunConfig& config, const RunMetrics& metrics);

}  // namespace rtsched
