#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "rtsched/cli.hpp"
#include "rtsched/engine.hpp"
#include "rtsched/scenario.hpp"

using namespace rtsched;

namespace {

std::string run_csv(const std::string& scenario, const std::vector<std::string>& overrides,
                    int threads = 1) {
  std::ostringstream out, err;
  const int code = cmd_run(scenario, overrides, out, err, threads);
  REQUIRE_MESSAGE(code == 0, err.str());
  return out.str();
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/" + name;
  std::ofstream f(path);
  f << content;
  return path;
}

const std::vector<std::string> kSmallOverrides{"run.horizon=2000", "run.seeds=[7]",
                                               "admission.p=[0.6,0.9]"};

}  // namespace

TEST_CASE("built-in listing") {
  std::ostringstream out;
  CHECK(cmd_list(out) == 0);
  const auto listing = out.str();
  int lines = 0;
  for (char c : listing)
    if (c == '\n') ++lines;
  CHECK(lines >= 6);
  for (const char* name : {"fig3a", "fig3b", "col3", "col5", "g1", "g2"})
    CHECK(listing.find(name) != std::string::npos);
}

TEST_CASE("every built-in parses, validates, and round-trips") {
  for (const auto& [name, description] : builtin_scenarios()) {
    CAPTURE(name);
    CHECK_FALSE(description.empty());
    const Scenario sc = load_scenario(name, {});
    // Serialize and re-parse: equivalent experiment.
    const Scenario again = parse_scenario(scenario_to_json(sc));
    CHECK(again.family.graph() == sc.family.graph());
    CHECK(again.family.masks() == sc.family.masks());
    CHECK(again.traffic == sc.traffic);
    CHECK(again.admission_kind == sc.admission_kind);
    CHECK(again.p_values == sc.p_values);
    CHECK(again.p_offsets == sc.p_offsets);
    CHECK(again.schedulers == sc.schedulers);
    CHECK(again.horizon == sc.horizon);
    CHECK(again.seeds == sc.seeds);
    CHECK(again.sample_every == sc.sample_every);
  }
}

TEST_CASE("g2 declares eight links and two maximal sets") {
  const Scenario sc = load_scenario("g2", {});
  CHECK(sc.family.graph().num_links() == 8);
  CHECK(sc.family.size() == 2);
}

TEST_CASE("run command produces one row per sweep point") {
  const auto csv = run_csv("fig3a", kSmallOverrides);
  int rows = -1;  // header
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 2 * 3 * 1);  // p values x schedulers x seeds
  CHECK(csv.rfind("scenario,scheduler,seed,p,delivery_ratio,mean_deficit,", 0) == 0);
}

TEST_CASE("run command is byte-deterministic, threads included") {
  const auto once = run_csv("fig3a", kSmallOverrides);
  const auto twice = run_csv("fig3a", kSmallOverrides);
  const auto threaded = run_csv("fig3a", kSmallOverrides, 4);
  CHECK(once == twice);
  CHECK(once == threaded);
}

TEST_CASE("csv golden row for a pinned run") {
  // Frozen output of the fig3a scenario at p = 0.55, seed 7, 2000 slots.
  // Guards the column order and float formatting.
  const auto csv = run_csv("fig3a", {"run.horizon=2000", "run.seeds=[7]",
                                     "admission.p=[0.55]"});
  std::istringstream lines(csv);
  std::string header, amnd_row;
  std::getline(lines, header);
  std::getline(lines, amnd_row);
  CHECK(amnd_row == "fig3a,amnd,7,0.55;0.551,1;1,0.137625,0,0,1,2000");
}

TEST_CASE("malformed and invalid scenario files exit 2") {
  std::ostringstream out, err;
  const auto broken = write_temp("rtsched_broken.json", "{\"graph\": ");
  CHECK(cmd_run(broken, {}, out, err, 1) == 2);
  CHECK(out.str().empty());  // no partial CSV
  CHECK(err.str().find(":1:") != std::string::npos);

  // Unknown keys are rejected.
  nlohmann::json doc = builtin_scenario_json("fig3a");
  doc["traffic"]["typo_key"] = 1;
  const auto unknown = write_temp("rtsched_unknown.json", doc.dump());
  std::ostringstream out2, err2;
  CHECK(cmd_run(unknown, {}, out2, err2, 1) == 2);
  CHECK(err2.str().find("typo_key") != std::string::npos);

  std::ostringstream out3, err3;
  CHECK(cmd_run("/nonexistent/path.json", {}, out3, err3, 1) == 2);
}

TEST_CASE("oracle command reports the exhaustive max gain") {
  // The two-slot worked instance: deadline-1 packet on link 1, deadline-2
  // packet on link 2, deficits 10 and 10, no arrivals or credits.
  const auto path = write_temp("rtsched_oracle.json", R"({
    "graph": {"kind": "collocated", "links": 2},
    "initial_deficits": [10, 10],
    "initial_buffers": [[1, 1, 1], [2, 2, 1]],
    "arrivals": [[], []]
  })");
  std::ostringstream out, err;
  REQUIRE(cmd_oracle(path, out, err) == 0);
  CHECK(out.str().find("max gain: 20") != std::string::npos);
  CHECK(out.str().find("slot 0: link 1 d=1") != std::string::npos);
  CHECK(out.str().find("slot 1: link 2 d=1") != std::string::npos);

  const auto empty = write_temp("rtsched_oracle_empty.json", R"({
    "graph": {"kind": "collocated", "links": 2},
    "arrivals": [[], [], []]
  })");
  std::ostringstream out2, err2;
  REQUIRE(cmd_oracle(empty, out2, err2) == 0);
  CHECK(out2.str().find("max gain: 0") != std::string::npos);

  // Oversized: eight collocated links over twenty slots.
  nlohmann::json big;
  big["graph"] = {{"kind", "collocated"}, {"links", 8}};
  big["arrivals"] = nlohmann::json::array();
  for (int t = 0; t < 20; ++t) big["arrivals"].push_back(nlohmann::json::array());
  const auto oversized = write_temp("rtsched_oracle_big.json", big.dump());
  std::ostringstream out3, err3;
  CHECK(cmd_oracle(oversized, out3, err3) == 3);
  CHECK(err3.str().find("search bound") != std::string::npos);
}

TEST_CASE("markov traffic parses from a scenario file and runs") {
  const auto path = write_temp("rtsched_markov.json", R"({
    "name": "markov-demo",
    "graph": {"kind": "collocated", "links": 2},
    "traffic": {
      "mode": "markov",
      "patterns": [ [[1, 1, 1]], [[2, 2, 1]], [] ],
      "transition": [[0.2, 0.8, 0.0], [0.0, 0.1, 0.9], [1.0, 0.0, 0.0]],
      "start": 1
    },
    "admission": {"kind": "coin_toss", "p": [0.5]},
    "schedulers": ["amnd", "edf"],
    "run": {"horizon": 5000, "seeds": [3]}
  })");
  const Scenario sc = load_scenario(path, {});
  CHECK(sc.traffic.mode() == TrafficProcess::Mode::markov);
  CHECK(sc.traffic.current_state() == 1);
  const auto results = run_many(build_runs(sc), 1);
  REQUIRE(results.size() == 2);
  for (const auto& m : results) CHECK(m.accounting_ok);
  // Same seed, same traffic stream: both schedulers saw identical arrivals.
  CHECK(results[0].arrivals == results[1].arrivals);

  // A reducible transition matrix is rejected at load.
  const auto reducible = write_temp("rtsched_markov_bad.json", R"({
    "graph": {"kind": "collocated", "links": 2},
    "traffic": {
      "mode": "markov",
      "patterns": [ [[1, 1, 1]], [] ],
      "transition": [[0.5, 0.5], [0.0, 1.0]]
    },
    "admission": {"kind": "coin_toss", "p": [0.5]},
    "schedulers": ["edf"],
    "run": {"horizon": 100, "seeds": [1]}
  })");
  std::ostringstream out, err;
  CHECK(cmd_run(reducible, {}, out, err, 1) == 2);
  CHECK(err.str().find("reducible") != std::string::npos);
}

TEST_CASE("the shipped demo scenario loads and runs") {
  const std::string path = std::string(RTSCHED_SOURCE_DIR) + "/scenarios/demo.json";
  const Scenario sc = load_scenario(path, {"run.horizon=2000", "run.seeds=[1]",
                                           "admission.p=[0.6]"});
  CHECK(sc.name == "demo");
  CHECK(sc.family.graph().num_links() == 3);
  const auto results = run_many(build_runs(sc), 2);
  CHECK(results.size() == 3);
  for (const auto& m : results) CHECK(m.accounting_ok);
}

TEST_CASE("overrides patch nested keys") {
  const Scenario sc = load_scenario("fig3a", {"run.horizon=123", "admission.kind=coin_toss"});
  CHECK(sc.horizon == 123);
  CHECK(sc.admission_kind == AdmissionScheme::Kind::coin_toss);
  CHECK_THROWS_AS(load_scenario("fig3a", {"no_equals_sign"}), std::invalid_argument);
}
