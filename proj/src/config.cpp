#include "cft/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace cft {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kConfigInvalid, "field '" + field + "': " + why);
}

std::uint64_t get_uint(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    bad(field, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) bad(where.empty() ? k : where + "." + k, "unknown field");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> get_pairs(const json& j,
                                                           const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of pairs");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) bad(f, "expected [u, v]");
    out.emplace_back(get_uint(j[i][0], f), get_uint(j[i][1], f));
  }
  return out;
}

GraphSpec parse_graph(const json& j) {
  check_keys(j, "graph", {"kind", "n", "edges", "seed", "degreeCap", "extraEdges"});
  GraphSpec g;
  if (!j.contains("kind")) bad("graph.kind", "missing");
  const std::string kind = get_string(j["kind"], "graph.kind");
  if (kind == "edges") {
    g.kind = GraphKind::kEdges;
  } else if (kind == "randomTree") {
    g.kind = GraphKind::kRandomTree;
  } else if (kind == "randomConnected") {
    g.kind = GraphKind::kRandomConnected;
  } else {
    bad("graph.kind", "unknown kind '" + kind + "'");
  }
  if (!j.contains("n")) bad("graph.n", "missing");
  g.n = get_uint(j["n"], "graph.n");
  if (g.n < 1) bad("graph.n", "must be at least 1");
  if (g.kind == GraphKind::kEdges) {
    if (!j.contains("edges")) bad("graph.edges", "missing");
    g.edges = get_pairs(j["edges"], "graph.edges");
    for (const auto& [u, v] : g.edges) {
      if (u < 1 || u > g.n || v < 1 || v > g.n) bad("graph.edges", "node out of range 1..n");
    }
  } else {
    if (j.contains("edges")) bad("graph.edges", "only allowed for kind 'edges'");
    if (j.contains("seed")) g.seed = get_uint(j["seed"], "graph.seed");
    if (j.contains("degreeCap")) g.degree_cap = get_uint(j["degreeCap"], "graph.degreeCap");
    if (j.contains("extraEdges")) g.extra_edges = get_uint(j["extraEdges"], "graph.extraEdges");
  }
  return g;
}

void parse_adversary(const json& j, ScenarioConfig& c) {
  if (j.is_string()) {
    auto k = strategy_from_string(j.get<std::string>());
    if (!k) bad("adversary", "unknown strategy '" + j.get<std::string>() + "'");
    c.adversary = *k;
    return;
  }
  check_keys(j, "adversary", {"strategy", "seed", "sequence"});
  if (!j.contains("strategy")) bad("adversary.strategy", "missing");
  auto k = strategy_from_string(get_string(j["strategy"], "adversary.strategy"));
  if (!k) bad("adversary.strategy", "unknown strategy");
  c.adversary = *k;
  if (j.contains("seed")) c.adversary_seed = get_uint(j["seed"], "adversary.seed");
  if (j.contains("sequence")) {
    if (!j["sequence"].is_array()) bad("adversary.sequence", "expected an array");
    for (const auto& v : j["sequence"]) c.sequence.push_back(get_uint(v, "adversary.sequence"));
  }
  if ((c.adversary == StrategyKind::kExplicitSequence) != j.contains("sequence")) {
    bad("adversary.sequence", "required exactly for ExplicitSequence");
  }
}

ProbeSpec parse_probes(const json& j) {
  ProbeSpec p;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "allPairs") {
      p.kind = ProbeKind::kAllPairs;
    } else if (s == "none") {
      p.kind = ProbeKind::kNone;
    } else {
      bad("probes", "expected 'allPairs', 'none', {count, seed} or [[s,t],...]");
    }
  } else if (j.is_array()) {
    p.kind = ProbeKind::kExplicit;
    p.pairs = get_pairs(j, "probes");
  } else {
    check_keys(j, "probes", {"count", "seed"});
    p.kind = ProbeKind::kSampled;
    if (!j.contains("count")) bad("probes.count", "missing");
    p.count = get_uint(j["count"], "probes.count");
    if (j.contains("seed")) p.seed = get_uint(j["seed"], "probes.seed");
  }
  return p;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "", {"graph", "root", "b", "adversary", "deletions", "probes", "probeEvery",
                     "mode", "checks", "seed", "stopOnViolation"});
  ScenarioConfig c;
  if (!j.contains("graph")) bad("graph", "missing");
  c.graph = parse_graph(j["graph"]);
  if (j.contains("root")) {
    if (j["root"].is_string()) {
      if (j["root"] != "auto") bad("root", "expected a node index or 'auto'");
    } else {
      c.root = get_uint(j["root"], "root");
      if (*c.root < 1 || *c.root > c.graph.n) bad("root", "out of range 1..n");
    }
  }
  if (j.contains("b")) {
    const auto b = get_uint(j["b"], "b");
    if (b < 2 || b > 1000000) bad("b", "must be at least 2");
    c.b = static_cast<unsigned>(b);
  }
  if (j.contains("adversary")) parse_adversary(j["adversary"], c);
  if (j.contains("deletions")) {
    const json& d = j["deletions"];
    if (d.is_string()) {
      if (d != "untilOne") bad("deletions", "expected an integer, 'untilOne' or a list");
    } else if (d.is_array()) {
      if (j.contains("adversary")) bad("deletions", "a list conflicts with 'adversary'");
      c.adversary = StrategyKind::kExplicitSequence;
      for (const auto& v : d) c.sequence.push_back(get_uint(v, "deletions"));
      c.deletions = c.sequence.size();
    } else {
      c.deletions = get_uint(d, "deletions");
    }
  }
  for (std::size_t idx : c.sequence) {
    if (idx < 1 || idx > c.graph.n) bad("adversary.sequence", "node out of range 1..n");
  }
  if (j.contains("probes")) c.probes = parse_probes(j["probes"]);
  for (const auto& [s, t] : c.probes.pairs) {
    if (s < 1 || s > c.graph.n || t < 1 || t > c.graph.n) bad("probes", "node out of range 1..n");
  }
  if (j.contains("probeEvery")) {
    c.probe_every = get_uint(j["probeEvery"], "probeEvery");
    if (c.probe_every < 1) bad("probeEvery", "must be at least 1");
  }
  if (j.contains("mode")) {
    const std::string m = get_string(j["mode"], "mode");
    if (m == "phased") {
      c.mode = RunMode::kPhased;
    } else if (m == "interleaved") {
      c.mode = RunMode::kInterleaved;
    } else {
      bad("mode", "expected 'phased' or 'interleaved'");
    }
  }
  if (j.contains("checks")) {
    const std::string m = get_string(j["checks"], "checks");
    if (m == "full") {
      c.checks = CheckMode::kFull;
    } else if (m == "sampled") {
      c.checks = CheckMode::kSampled;
    } else {
      bad("checks", "expected 'full' or 'sampled'");
    }
  }
  if (j.contains("seed")) c.seed = get_uint(j["seed"], "seed");
  if (j.contains("stopOnViolation")) {
    if (!j["stopOnViolation"].is_boolean()) bad("stopOnViolation", "expected a boolean");
    c.stop_on_violation = j["stopOnViolation"].get<bool>();
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json g;
  switch (c.graph.kind) {
    case GraphKind::kEdges: g["kind"] = "edges"; break;
    case GraphKind::kRandomTree: g["kind"] = "randomTree"; break;
    case GraphKind::kRandomConnected: g["kind"] = "randomConnected"; break;
  }
  g["n"] = c.graph.n;
  if (c.graph.kind == GraphKind::kEdges) {
    g["edges"] = nlohmann::ordered_json::array();
    for (const auto& [u, v] : c.graph.edges) g["edges"].push_back({u, v});
  } else {
    g["seed"] = c.graph.seed;
    g["degreeCap"] = c.graph.degree_cap;
    if (c.graph.kind == GraphKind::kRandomConnected) g["extraEdges"] = c.graph.extra_edges;
  }
  j["graph"] = g;
  if (c.root) {
    j["root"] = *c.root;
  } else {
    j["root"] = "auto";
  }
  j["b"] = c.b;
  nlohmann::ordered_json a;
  a["strategy"] = to_string(c.adversary);
  a["seed"] = c.adversary_seed;
  if (c.adversary == StrategyKind::kExplicitSequence) a["sequence"] = c.sequence;
  j["adversary"] = a;
  if (c.deletions) {
    j["deletions"] = *c.deletions;
  } else {
    j["deletions"] = "untilOne";
  }
  switch (c.probes.kind) {
    case ProbeKind::kNone: j["probes"] = "none"; break;
    case ProbeKind::kAllPairs: j["probes"] = "allPairs"; break;
    case ProbeKind::kSampled:
      j["probes"] = {{"count", c.probes.count}, {"seed", c.probes.seed}};
      break;
    case ProbeKind::kExplicit:
      j["probes"] = nlohmann::ordered_json::array();
      for (const auto& [s, t] : c.probes.pairs) j["probes"].push_back({s, t});
      break;
  }
  j["probeEvery"] = c.probe_every;
  j["mode"] = c.mode == RunMode::kPhased ? "phased" : "interleaved";
  j["checks"] = c.checks == CheckMode::kFull ? "full" : "sampled";
  j["seed"] = c.seed;
  j["stopOnViolation"] = c.stop_on_violation;
  return j.dump(2) + "\n";
}

}  // namespace cft
