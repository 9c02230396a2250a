#include "rtsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rtsched {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      fail(where, "unknown key '" + key + "'");
  }
}

int get_int(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where, std::string("missing '") + key + "'");
  if (!obj[key].is_number_integer()) fail(where, std::string("'") + key + "' must be an integer");
  return obj[key].get<int>();
}

// Links are 1-indexed in scenario files, matching the usual l1..lK notation.
int parse_link(const json& value, const std::string& where, int num_links) {
  if (!value.is_number_integer()) fail(where, "link must be an integer");
  const int link = value.get<int>();
  if (link < 1 || link > num_links) fail(where, "link index out of range (links are 1-indexed)");
  return link - 1;
}

InterferenceGraph parse_graph(const json& g) {
  expect_keys(g, "graph", {"kind", "links", "parts", "edges"});
  if (!g.contains("kind") || !g["kind"].is_string()) fail("graph", "missing 'kind'");
  const std::string kind = g["kind"].get<std::string>();
  if (kind == "collocated" || kind == "star") {
    expect_keys(g, "graph", {"kind", "links"});
    const int links = get_int(g, "graph", "links");
    return kind == "collocated" ? make_collocated(links) : make_star(links);
  }
  if (kind == "complete_partite") {
    expect_keys(g, "graph", {"kind", "parts"});
    if (!g.contains("parts") || !g["parts"].is_array()) fail("graph", "missing 'parts'");
    std::vector<int> parts;
    for (const auto& p : g["parts"]) {
      if (!p.is_number_integer()) fail("graph.parts", "part sizes must be integers");
      parts.push_back(p.get<int>());
    }
    return make_complete_partite(parts);
  }
  if (kind == "explicit") {
    expect_keys(g, "graph", {"kind", "links", "edges"});
    const int links = get_int(g, "graph", "links");
    if (!g.contains("edges") || !g["edges"].is_array()) fail("graph", "missing 'edges'");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : g["edges"]) {
      if (!e.is_array() || e.size() != 2) fail("graph.edges", "each edge is a [a, b] pair");
      edges.emplace_back(parse_link(e[0], "graph.edges", links),
                         parse_link(e[1], "graph.edges", links));
    }
    return make_explicit(links, std::move(edges));
  }
  fail("graph", "unknown kind '" + kind + "'");
}

ArrivalBatch parse_pattern(const json& slots, const std::string& where, int num_links,
                           int max_deadline) {
  if (!slots.is_array()) fail(where, "a slot template is a list of [link, deadline, count]");
  ArrivalBatch batch(num_links, max_deadline);
  for (const auto& triple : slots) {
    if (!triple.is_array() || (triple.size() != 2 && triple.size() != 3))
      fail(where, "each arrival is [link, deadline] or [link, deadline, count]");
    const int link = parse_link(triple[0], where, num_links);
    if (!triple[1].is_number_integer()) fail(where, "deadline must be an integer");
    const int deadline = triple[1].get<int>();
    const int count = triple.size() == 3 ? triple[2].get<int>() : 1;
    if (deadline < 1 || deadline > max_deadline) fail(where, "deadline out of range");
    batch.add(link, deadline, count);
  }
  return batch;
}

TrafficProcess parse_traffic(const json& t, int num_links) {
  expect_keys(t, "traffic", {"mode", "patterns", "transition", "start", "iid", "max_deadline"});
  if (!t.contains("mode") || !t["mode"].is_string()) fail("traffic", "missing 'mode'");
  const std::string mode = t["mode"].get<std::string>();

  // The shape of every batch is fixed up front: scan for the largest deadline.
  int max_deadline = 1;
  if (t.contains("max_deadline")) max_deadline = get_int(t, "traffic", "max_deadline");
  if (t.contains("patterns"))
    for (const auto& slots : t["patterns"])
      for (const auto& triple : slots)
        if (triple.is_array() && triple.size() >= 2 && triple[1].is_number_integer())
          max_deadline = std::max(max_deadline, triple[1].get<int>());
  if (t.contains("iid"))
    for (const auto& entry : t["iid"])
      if (entry.is_object() && entry.contains("outcomes"))
        for (const auto& o : entry["outcomes"])
          if (o.is_array() && o.size() == 3 && o[2].is_number_integer())
            max_deadline = std::max(max_deadline, o[2].get<int>());

  TrafficProcess process = TrafficProcess::iid(num_links, max_deadline);
  if (mode == "periodic" || mode == "markov") {
    if (!t.contains("patterns") || !t["patterns"].is_array() || t["patterns"].empty())
      fail("traffic", "mode '" + mode + "' needs a nonempty 'patterns' list");
    std::vector<ArrivalBatch> patterns;
    for (std::size_t i = 0; i < t["patterns"].size(); ++i)
      patterns.push_back(parse_pattern(t["patterns"][i],
                                       "traffic.patterns[" + std::to_string(i) + "]", num_links,
                                       max_deadline));
    const int start = t.contains("start") ? get_int(t, "traffic", "start") : 0;
    if (mode == "periodic") {
      if (t.contains("transition")) fail("traffic", "periodic mode takes no 'transition'");
      process = TrafficProcess::periodic(std::move(patterns), start);
    } else {
      if (!t.contains("transition") || !t["transition"].is_array())
        fail("traffic", "markov mode needs a 'transition' matrix");
      std::vector<std::vector<double>> transition;
      for (const auto& row : t["transition"]) {
        if (!row.is_array()) fail("traffic.transition", "rows must be arrays");
        std::vector<double> r;
        for (const auto& p : row) r.push_back(p.get<double>());
        transition.push_back(std::move(r));
      }
      process = TrafficProcess::markov(std::move(patterns), std::move(transition), start);
    }
  } else if (mode == "iid") {
    if (t.contains("patterns") || t.contains("transition") || t.contains("start"))
      fail("traffic", "iid mode takes only 'iid' distributions");
    if (!t.contains("iid")) fail("traffic", "iid mode needs an 'iid' list");
  } else {
    fail("traffic", "unknown mode '" + mode + "'");
  }

  if (t.contains("iid")) {
    if (!t["iid"].is_array()) fail("traffic.iid", "expected a list");
    for (const auto& entry : t["iid"]) {
      expect_keys(entry, "traffic.iid[]", {"link", "outcomes"});
      const int link = parse_link(entry.at("link"), "traffic.iid[]", num_links);
      std::vector<IidOutcome> outcomes;
      for (const auto& o : entry.at("outcomes")) {
        if (!o.is_array() || o.size() != 3)
          fail("traffic.iid[]", "each outcome is [prob, count, deadline]");
        outcomes.push_back({o[0].get<double>(), o[1].get<int>(), o[2].get<int>()});
      }
      process.add_iid_link(link, std::move(outcomes));
    }
  }
  return process;
}

std::vector<double> parse_p_values(const json& p) {
  std::vector<double> values;
  if (p.is_array()) {
    for (const auto& v : p) values.push_back(v.get<double>());
  } else if (p.is_number()) {
    values.push_back(p.get<double>());
  } else if (p.is_object()) {
    expect_keys(p, "admission.p", {"start", "stop", "step"});
    const double start = p.at("start").get<double>();
    const double stop = p.at("stop").get<double>();
    const double step = p.at("step").get<double>();
    if (!(step > 0.0)) fail("admission.p", "step must be positive");
    for (double v = start; v <= stop + 1e-12; v += step) values.push_back(v);
  } else {
    fail("admission.p", "expected a number, list, or {start, stop, step}");
  }
  if (values.empty()) fail("admission.p", "empty sweep");
  return values;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  expect_keys(doc, "scenario",
              {"name", "description", "graph", "traffic", "admission", "schedulers", "run"});
  for (const char* key : {"graph", "traffic", "admission", "schedulers", "run"})
    if (!doc.contains(key)) fail("scenario", std::string("missing '") + key + "'");

  InterferenceGraph graph = parse_graph(doc["graph"]);
  const int K = graph.num_links();

  const json& adm = doc["admission"];
  expect_keys(adm, "admission", {"kind", "p", "offsets"});
  const std::string kind = adm.value("kind", std::string{});
  AdmissionScheme::Kind admission_kind;
  if (kind == "deterministic")
    admission_kind = AdmissionScheme::Kind::deterministic;
  else if (kind == "coin_toss")
    admission_kind = AdmissionScheme::Kind::coin_toss;
  else
    fail("admission", "kind must be 'deterministic' or 'coin_toss'");
  if (!adm.contains("p")) fail("admission", "missing 'p'");
  std::vector<double> p_values = parse_p_values(adm["p"]);
  std::vector<double> p_offsets(static_cast<std::size_t>(K), 0.0);
  if (adm.contains("offsets")) {
    if (!adm["offsets"].is_array() || static_cast<int>(adm["offsets"].size()) != K)
      fail("admission.offsets", "need one offset per link");
    for (int l = 0; l < K; ++l)
      p_offsets[static_cast<std::size_t>(l)] = adm["offsets"][static_cast<std::size_t>(l)].get<double>();
  }
  for (double p : p_values)
    for (double off : p_offsets)
      if (p + off < -1e-12 || p + off > 1.0 + 1e-12)
        fail("admission", "p + offset leaves [0, 1]");

  if (!doc["schedulers"].is_array() || doc["schedulers"].empty())
    fail("schedulers", "need a nonempty list");
  std::vector<PolicyKind> schedulers;
  for (const auto& s : doc["schedulers"]) {
    const auto kind_opt = policy_from_name(s.get<std::string>());
    if (!kind_opt) fail("schedulers", "unknown scheduler '" + s.get<std::string>() + "'");
    if (!policy_supports(*kind_opt, graph))
      fail("schedulers", std::string(policy_name(*kind_opt)) + " requires a collocated graph");
    schedulers.push_back(*kind_opt);
  }

  const json& run_block = doc["run"];
  expect_keys(run_block, "run", {"horizon", "seeds", "sample_every"});
  const std::int64_t horizon = run_block.value("horizon", std::int64_t{0});
  if (horizon < 1) fail("run", "horizon must be >= 1");
  if (!run_block.contains("seeds") || !run_block["seeds"].is_array() ||
      run_block["seeds"].empty())
    fail("run", "need a nonempty 'seeds' list");
  std::vector<std::uint64_t> seeds;
  for (const auto& s : run_block["seeds"]) seeds.push_back(s.get<std::uint64_t>());
  const int sample_every = run_block.value("sample_every", 100);
  if (sample_every < 1) fail("run", "sample_every must be >= 1");

  return Scenario{
      .name = doc.value("name", std::string{}),
      .description = doc.value("description", std::string{}),
      .family = enumerate_mis(graph),
      .traffic = parse_traffic(doc["traffic"], K),
      .admission_kind = admission_kind,
      .p_values = std::move(p_values),
      .p_offsets = std::move(p_offsets),
      .schedulers = std::move(schedulers),
      .horizon = horizon,
      .seeds = std::move(seeds),
      .sample_every = sample_every,
  };
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  json doc;
  if (!scenario.name.empty()) doc["name"] = scenario.name;
  if (!scenario.description.empty()) doc["description"] = scenario.description;

  const auto& graph = scenario.family.graph();
  json g;
  g["kind"] = "explicit";
  g["links"] = graph.num_links();
  json edges = json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back({a + 1, b + 1});
  g["edges"] = std::move(edges);
  doc["graph"] = std::move(g);

  const auto& traffic = scenario.traffic;
  json t;
  t["max_deadline"] = traffic.max_deadline();
  switch (traffic.mode()) {
    case TrafficProcess::Mode::periodic: t["mode"] = "periodic"; break;
    case TrafficProcess::Mode::markov: t["mode"] = "markov"; break;
    case TrafficProcess::Mode::iid: t["mode"] = "iid"; break;
  }
  if (traffic.mode() != TrafficProcess::Mode::iid) {
    json patterns = json::array();
    for (const auto& batch : traffic.patterns()) {
      json slots = json::array();
      for (int l = 0; l < batch.num_links(); ++l)
        for (int d = 1; d <= batch.max_deadline(); ++d)
          if (batch.count(l, d) > 0) slots.push_back({l + 1, d, batch.count(l, d)});
      patterns.push_back(std::move(slots));
    }
    t["patterns"] = std::move(patterns);
    if (traffic.mode() == TrafficProcess::Mode::markov) t["transition"] = traffic.transition();
    if (traffic.current_state() != 0) t["start"] = traffic.current_state();
  }
  json iid = json::array();
  for (int l = 0; l < traffic.num_links(); ++l) {
    const auto& outcomes = traffic.iid_outcomes()[static_cast<std::size_t>(l)];
    if (outcomes.empty()) continue;
    json list = json::array();
    for (const auto& o : outcomes) list.push_back({o.prob, o.count, o.deadline});
    iid.push_back({{"link", l + 1}, {"outcomes", std::move(list)}});
  }
  if (!iid.empty()) t["iid"] = std::move(iid);
  doc["traffic"] = std::move(t);

  json adm;
  adm["kind"] = scenario.admission_kind == AdmissionScheme::Kind::deterministic ? "deterministic"
                                                                                : "coin_toss";
  adm["p"] = scenario.p_values;
  adm["offsets"] = scenario.p_offsets;
  doc["admission"] = std::move(adm);

  json scheds = json::array();
  for (PolicyKind k : scenario.schedulers) scheds.push_back(std::string(policy_name(k)));
  doc["schedulers"] = std::move(scheds);

  doc["run"] = {{"horizon", scenario.horizon},
                {"seeds", scenario.seeds},
                {"sample_every", scenario.sample_every}};
  return doc;
}

std::vector<double> admission_ratios(const Scenario& scenario, double base_p) {
  std::vector<double> ratios(scenario.p_offsets.size());
  for (std::size_t l = 0; l < ratios.size(); ++l)
    ratios[l] = std::clamp(base_p + scenario.p_offsets[l], 0.0, 1.0);
  return ratios;
}

std::vector<RunConfig> build_runs(const Scenario& scenario) {
  std::vector<RunConfig> runs;
  for (double p : scenario.p_values) {
    for (PolicyKind scheduler : scenario.schedulers) {
      for (std::uint64_t seed : scenario.seeds) {
        runs.push_back(RunConfig{
            .scenario_id = scenario.name.empty() ? "scenario" : scenario.name,
            .family = scenario.family,
            .traffic = scenario.traffic,
            .admission = {scenario.admission_kind, admission_ratios(scenario, p)},
            .scheduler = scheduler,
            .horizon = scenario.horizon,
            .seed = seed,
            .sample_every = scenario.sample_every,
        });
      }
    }
  }
  return runs;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string join_doubles(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt_double(values[i]);
  }
  return out;
}

}  // namespace

void write_csv_header(std::ostream& out) {
  out << "scenario,scheduler,seed,p,delivery_ratio,mean_deficit,final_total_deficit,"
         "slope,stable,T\n";
}

void write_csv_row(std::ostream& out, const RunConfig& config, const RunMetrics& metrics) {
  out << config.scenario_id << ',' << policy_name(config.scheduler) << ',' << config.seed << ','
      << join_doubles(config.admission.target_ratio) << ','
      << join_doubles(metrics.delivery_ratio) << ',' << fmt_double(metrics.mean_deficit) << ','
      << fmt_double(metrics.final_total_deficit) << ',' << fmt_double(metrics.slope) << ','
      << (metrics.stable ? 1 : 0) << ',' << config.horizon << '\n';
}

namespace {

const char* kFig3a = R"json({
  "name": "fig3a",
  "description": "Two collocated links; alternating two-slot arrival blocks with opposed deadlines; deterministic admission, p2 = p1 + 0.001.",
  "graph": {"kind": "collocated", "links": 2},
  "traffic": {"mode": "periodic", "patterns": [
    [[1, 1, 1], [2, 2, 1]],
    [],
    [[1, 2, 1], [2, 1, 1]],
    []
  ]},
  "admission": {"kind": "deterministic", "p": {"start": 0.5, "stop": 0.95, "step": 0.05},
                "offsets": [0.0, 0.001]},
  "schedulers": ["amnd", "ldf-rd", "ldf-ed"],
  "run": {"horizon": 200000, "seeds": [1, 2, 3], "sample_every": 100}
})json";

const char* kFig3b = R"json({
  "name": "fig3b",
  "description": "Two collocated links; a single-packet block followed by the mirrored two-packet block; coin-toss admission, equal ratios.",
  "graph": {"kind": "collocated", "links": 2},
  "traffic": {"mode": "periodic", "patterns": [
    [[1, 1, 1]],
    [],
    [[1, 2, 1], [2, 1, 1]],
    []
  ]},
  "admission": {"kind": "coin_toss", "p": {"start": 0.5, "stop": 0.95, "step": 0.05}},
  "schedulers": ["amnd", "ldf-rd", "ldf-ed"],
  "run": {"horizon": 200000, "seeds": [1, 2, 3], "sample_every": 100}
})json";

const char* kCol3 = R"json({
  "name": "col3",
  "description": "Three collocated links; eight-slot overloaded cycle with staggered deadlines, supportable uniform ratio 7/8.",
  "graph": {"kind": "collocated", "links": 3},
  "traffic": {"mode": "periodic", "patterns": [
    [[1, 1, 1], [2, 2, 1], [3, 3, 1]],
    [],
    [],
    [[1, 2, 1], [2, 1, 1]],
    [[3, 1, 1]],
    [[1, 1, 1], [2, 2, 1]],
    [],
    []
  ]},
  "admission": {"kind": "coin_toss", "p": {"start": 0.5, "stop": 0.875, "step": 0.025}},
  "schedulers": ["amnd", "ldf-rd", "ldf-ed"],
  "run": {"horizon": 200000, "seeds": [1, 2, 3], "sample_every": 100}
})json";

const char* kCol5 = R"json({
  "name": "col5",
  "description": "Five collocated links; one arrival per link per cycle with staircase deadlines 1..5, supportable uniform ratio 1.",
  "graph": {"kind": "collocated", "links": 5},
  "traffic": {"mode": "periodic", "patterns": [
    [[1, 1, 1], [2, 2, 1], [3, 3, 1], [4, 4, 1], [5, 5, 1]],
    [],
    [],
    [],
    []
  ]},
  "admission": {"kind": "coin_toss", "p": {"start": 0.5, "stop": 1.0, "step": 0.05}},
  "schedulers": ["amnd", "ldf-rd", "ldf-ed"],
  "run": {"horizon": 200000, "seeds": [1, 2, 3], "sample_every": 100}
})json";

const char* kG1 = R"json({
  "name": "g1",
  "description": "Five links, sparse interference (edges 12, 23, 24, 45); five-slot periodic traffic mixing deadlines 1-3.",
  "graph": {"kind": "explicit", "links": 5, "edges": [[1, 2], [2, 3], [2, 4], [4, 5]]},
  "traffic": {"mode": "periodic", "patterns": [
    [[2, 2, 1], [2, 3, 1], [4, 2, 1], [4, 3, 1], [1, 1, 1], [3, 1, 1], [5, 1, 1]],
    [],
    [],
    [[2, 1, 1], [4, 1, 1], [1, 2, 1], [3, 2, 1], [5, 2, 1]],
    []
  ]},
  "admission": {"kind": "deterministic", "p": {"start": 0.5, "stop": 1.0, "step": 0.05}},
  "schedulers": ["amms", "ldf-rd", "ldf-ed", "edf"],
  "run": {"horizon": 200000, "seeds": [1, 2, 3], "sample_every": 100}
})json";

const char* kG2 = R"json({
  "name": "g2",
  "description": "Eight links, complete bipartite 4+4; periodic traffic on four links plus Bernoulli and bursty i.i.d. traffic on the rest.",
  "graph": {"kind": "complete_partite", "parts": [4, 4]},
  "traffic": {"mode": "periodic", "max_deadline": 10, "patterns": [
    [[1, 1, 1], [2, 1, 1], [5, 2, 1], [5, 3, 1], [6, 2, 1], [6, 3, 1]],
    [],
    [],
    [[1, 2, 1], [2, 2, 1], [5, 1, 1], [6, 1, 1]],
    []
  ],
  "iid": [
    {"link": 3, "outcomes": [[0.25, 1, 1]]},
    {"link": 4, "outcomes": [[0.25, 1, 1]]},
    {"link": 7, "outcomes": [[0.05, 7, 10]]},
    {"link": 8, "outcomes": [[0.05, 7, 10]]}
  ]},
  "admission": {"kind": "coin_toss", "p": {"start": 0.5, "stop": 0.95, "step": 0.05}},
  "schedulers": ["amms", "ldf-rd", "ldf-ed", "edf"],
  "run": {"horizon": 200000, "seeds": [1, 2, 3], "sample_every": 100}
})json";

const std::vector<std::pair<std::string, const char*>>& builtin_table() {
  static const std::vector<std::pair<std::string, const char*>> table = {
      {"fig3a", kFig3a}, {"fig3b", kFig3b}, {"col3", kCol3},
      {"col5", kCol5},   {"g1", kG1},       {"g2", kG2},
  };
  return table;
}

// Dotted-path override: "run.horizon=1000". The value is parsed as JSON when
// possible, otherwise taken as a string.
void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty()) throw std::invalid_argument("override '" + assignment + "' has an empty key");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> builtin_scenarios() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, text] : builtin_table())
    out.emplace_back(name, json::parse(text).value("description", std::string{}));
  return out;
}

bool is_builtin_scenario(const std::string& name) {
  for (const auto& [n, text] : builtin_table()) {
    (void)text;
    if (n == name) return true;
  }
  return false;
}

nlohmann::json builtin_scenario_json(const std::string& name) {
  for (const auto& [n, text] : builtin_table())
    if (n == name) return json::parse(text);
  throw std::invalid_argument("unknown built-in scenario '" + name + "'");
}

Scenario load_scenario(const std::string& path_or_builtin,
                       const std::vector<std::string>& overrides) {
  json doc;
  if (is_builtin_scenario(path_or_builtin)) {
    doc = builtin_scenario_json(path_or_builtin);
  } else {
    std::ifstream in(path_or_builtin);
    if (!in) throw std::invalid_argument("cannot open scenario '" + path_or_builtin + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      // nlohmann reports a byte offset; anchor the message to a line.
      std::size_t line = 1;
      for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
      throw std::invalid_argument(path_or_builtin + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_scenario(doc);
}

}  // namespace rtsched
