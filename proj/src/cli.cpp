#include "rtsched/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rtsched/oracle.hpp"
#include "rtsched/scenario.hpp"

namespace rtsched {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

InterferenceGraph parse_instance_graph(const json& g) {
  // Reuse the scenario schema by wrapping the graph block in a dummy scenario
  // would drag in the whole experiment config; parse the few kinds directly.
  const std::string kind = g.value("kind", std::string{});
  if (kind == "collocated") return make_collocated(g.at("links").get<int>());
  if (kind == "star") return make_star(g.at("links").get<int>());
  if (kind == "complete_partite")
    return make_complete_partite(g.at("parts").get<std::vector<int>>());
  if (kind == "explicit") {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : g.at("edges"))
      edges.emplace_back(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
    return make_explicit(g.at("links").get<int>(), std::move(edges));
  }
  throw std::invalid_argument("oracle instance: unknown graph kind '" + kind + "'");
}

HorizonInstance parse_instance(const json& doc) {
  InterferenceGraph graph = parse_instance_graph(doc.at("graph"));
  const int K = graph.num_links();

  int max_deadline = doc.value("max_deadline", 1);
  auto scan_triples = [&](const json& list) {
    for (const auto& t : list)
      if (t.is_array() && t.size() >= 2) max_deadline = std::max(max_deadline, t.at(1).get<int>());
  };
  if (doc.contains("initial_buffers")) scan_triples(doc["initial_buffers"]);
  for (const auto& slot : doc.at("arrivals")) scan_triples(slot);

  BufferState buffers(K, max_deadline);
  if (doc.contains("initial_buffers")) {
    for (const auto& t : doc["initial_buffers"]) {
      const int link = t.at(0).get<int>() - 1;
      const int deadline = t.at(1).get<int>();
      const int count = t.size() >= 3 ? t.at(2).get<int>() : 1;
      buffers.set_count(link, deadline, buffers.count(link, deadline) + count);
    }
  }

  DeficitVector deficits(static_cast<std::size_t>(K), 0.0);
  if (doc.contains("initial_deficits")) {
    const auto& w = doc["initial_deficits"];
    if (static_cast<int>(w.size()) != K)
      throw std::invalid_argument("oracle instance: initial_deficits needs one value per link");
    for (int l = 0; l < K; ++l) deficits[static_cast<std::size_t>(l)] = w[static_cast<std::size_t>(l)].get<double>();
  }

  std::vector<ArrivalBatch> arrivals;
  for (const auto& slot : doc.at("arrivals")) {
    ArrivalBatch batch(K, max_deadline);
    for (const auto& t : slot) {
      const int link = t.at(0).get<int>() - 1;
      const int deadline = t.at(1).get<int>();
      const int count = t.size() >= 3 ? t.at(2).get<int>() : 1;
      batch.add(link, deadline, count);
    }
    arrivals.push_back(std::move(batch));
  }

  std::vector<std::vector<double>> admitted;
  if (doc.contains("admitted"))
    admitted = doc["admitted"].get<std::vector<std::vector<double>>>();

  return HorizonInstance{enumerate_mis(graph), std::move(buffers), std::move(deficits),
                         std::move(arrivals), std::move(admitted)};
}

}  // namespace

int cmd_run(const std::string& scenario_path, const std::vector<std::string>& overrides,
            std::ostream& out, std::ostream& err, int threads) {
  std::optional<Scenario> scenario;
  try {
    scenario = load_scenario(scenario_path, overrides);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    const std::vector<RunConfig> configs = build_runs(*scenario);
    const std::vector<RunMetrics> results = run_many(configs, threads);
    std::ostringstream csv;
    write_csv_header(csv);
    for (std::size_t i = 0; i < configs.size(); ++i) write_csv_row(csv, configs[i], results[i]);
    out << csv.str();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_oracle(const std::string& instance_path, std::ostream& out, std::ostream& err) {
  std::optional<HorizonInstance> instance;
  try {
    instance = parse_instance(load_json_file(instance_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (!within_search_bound(*instance)) {
    err << "error: instance exceeds the search bound (" << instance->family.size()
        << " maximal sets over " << instance->horizon() << " slots, limit "
        << kMaxGainSearchBound << " sequences)\n";
    return 3;
  }
  try {
    const MaxGainResult result = max_gain(*instance);
    std::ostringstream report;
    report << "max gain: ";
    {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.9g", result.gain);
      report << buf << "\n";
    }
    for (std::size_t t = 0; t < result.schedule.size(); ++t) {
      report << "slot " << t << ":";
      bool any = false;
      const auto& decision = result.schedule[t];
      for (int l = 0; l < decision.num_links(); ++l) {
        if (decision.transmits(l)) {
          report << (any ? "," : "") << " link " << (l + 1) << " d="
                 << decision.deadline_class[static_cast<std::size_t>(l)];
          any = true;
        }
      }
      if (!any) report << " idle";
      report << "\n";
    }
    out << report.str();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_list(std::ostream& out) {
  std::ostringstream report;
  std::size_t width = 0;
  for (const auto& [name, description] : builtin_scenarios()) width = std::max(width, name.size());
  for (const auto& [name, description] : builtin_scenarios())
    report << name << std::string(width - name.size() + 2, ' ') << description << "\n";
  out << report.str();
  return 0;
}

}  // namespace rtsched
