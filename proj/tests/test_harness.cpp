#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "cft/config.hpp"
#include "cft/harness.hpp"

using namespace cft;

namespace {

const char* kNineNode = R"({
  "graph": {"kind": "edges", "n": 9,
            "edges": [[9,7],[9,8],[7,3],[7,6],[3,1],[3,2],[6,4],[6,5]]},
  "root": 9, "b": 2, "deletions": [7], "probes": [[8,1],[8,7]]
})";

std::size_t count(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(
      std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

std::string dot_after(const ScenarioConfig& base, std::size_t k) {
  ScenarioConfig c = base;
  c.deletions = k;
  c.probes.kind = ProbeKind::kNone;
  std::string out;
  RunHooks hooks;
  hooks.on_checkpoint = [&](std::size_t t, const Topology& topo) {
    if (t != k) return;
    std::ostringstream os;
    write_dot(os, topo);
    out = os.str();
  };
  run_scenario(c, hooks);
  return out;
}

ErrorCode config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST(Adversary, SameSeedSameChoices) {
  const LabelledTree t = preprocess(random_tree(60, 4), 0, 2);
  for (auto kind : {StrategyKind::kRandomLive, StrategyKind::kMaxDegreeFirst,
                    StrategyKind::kLeavesFirst, StrategyKind::kNonLeavesFirst}) {
    Topology a(t), b(t);
    Adversary x({kind, 17, {}}), y({kind, 17, {}});
    while (a.live_count() > 1) {
      const NodeId u = x.next(a);
      ASSERT_EQ(u, y.next(b));
      a.delete_node(u);
      b.delete_node(u);
    }
  }
}

TEST(Adversary, StrategiesPickFromTheirClass) {
  const LabelledTree t = preprocess(random_tree(60, 9), 0, 2);
  Topology topo(t);
  Adversary leaves({StrategyKind::kLeavesFirst, 1, {}});
  Adversary inner({StrategyKind::kNonLeavesFirst, 1, {}});
  Adversary maxdeg({StrategyKind::kMaxDegreeFirst, 1, {}});
  for (int i = 0; i < 20; ++i) {
    EXPECT_TRUE(topo.is_leaf(leaves.next(topo)));
    EXPECT_FALSE(topo.is_leaf(inner.next(topo)));
    std::size_t best = 0;
    for (NodeId v : topo.live_nodes()) best = std::max(best, topo.degree(v));
    EXPECT_EQ(topo.degree(maxdeg.next(topo)), best);
  }
}

TEST(Adversary, ExplicitSequence) {
  const LabelledTree t = preprocess(random_tree(5, 0), 0, 2);
  Topology topo(t);
  Adversary a({StrategyKind::kExplicitSequence, 0, {2, 2}});
  EXPECT_EQ(a.next(topo), 2u);
  topo.delete_node(2);
  try {
    a.next(topo);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreconditionViolated);
  }
  try {
    a.next(topo);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExhausted);
  }
}

TEST(Config, RoundTrip) {
  const ScenarioConfig c = parse_config(kNineNode);
  EXPECT_EQ(c.adversary, StrategyKind::kExplicitSequence);
  EXPECT_EQ(c.sequence, std::vector<std::size_t>{7});
  EXPECT_EQ(c.deletions, 1u);
  EXPECT_EQ(parse_config(dump_config(c)), c);

  ScenarioConfig r;
  r.graph = {GraphKind::kRandomConnected, 30, {}, 5, 4, 10};
  r.b = 3;
  r.adversary = StrategyKind::kMaxDegreeFirst;
  r.adversary_seed = 8;
  r.probes = {ProbeKind::kSampled, 40, 2, {}};
  r.probe_every = 3;
  r.mode = RunMode::kInterleaved;
  r.checks = CheckMode::kSampled;
  r.seed = 99;
  r.stop_on_violation = false;
  EXPECT_EQ(parse_config(dump_config(r)), r);
  EXPECT_EQ(dump_config(parse_config(dump_config(r))), dump_config(r));
}

TEST(Config, Rejections) {
  EXPECT_EQ(config_error("{"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(config_error(R"({"graph": {"kind": "randomTree", "n": 5}, "extra": 1})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(config_error(R"({"graph": {"kind": "randomTree", "n": 5}, "b": 1})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(config_error(R"({"graph": {"kind": "ring", "n": 5}})"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(config_error(R"({"graph": {"kind": "edges", "n": 2, "edges": [[1,3]]}})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(config_error(R"({"graph": {"kind": "randomTree", "n": 5}, "root": 6})"),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(config_error(R"({"graph": {"kind": "randomTree", "n": 5},
                             "adversary": "Sometimes"})"),
            ErrorCode::kConfigInvalid);
  try {
    parse_config(R"({"graph": {"kind": "randomTree", "n": 5, "colour": 1}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("graph.colour"), std::string::npos);
  }
}

TEST(Config, DisconnectedGraphIsConfigError) {
  ScenarioConfig c = parse_config(R"({"graph": {"kind": "edges", "n": 3, "edges": [[1,2]]}})");
  try {
    run_scenario(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
  }
}

TEST(Scenario, NineNodeMetrics) {
  const Metrics m = run_scenario(parse_config(kNineNode));
  EXPECT_TRUE(m.violations.empty());
  EXPECT_EQ(m.n, 9u);
  EXPECT_EQ(m.root, 9u);
  EXPECT_EQ(m.diameter_t0, 4u);
  ASSERT_EQ(m.rows.size(), 1u);
  EXPECT_EQ(m.rows[0].deleted, 7u);
  EXPECT_FALSE(m.rows[0].is_leaf);
  EXPECT_EQ(m.y, 1u);
  ASSERT_EQ(m.probe_log.size(), 4u);
  const ProbeRecord& after = m.probe_log[2];
  EXPECT_EQ(after.t, 1u);
  EXPECT_EQ(after.status, RouteStatus::kDelivered);
  EXPECT_EQ(after.logical, 5u);
  EXPECT_EQ(after.bound, 6u);
  EXPECT_EQ(m.probe_log[3].status, RouteStatus::kReturnedToSender);
}

TEST(Scenario, DotCounts) {
  const ScenarioConfig c = parse_config(kNineNode);
  const std::string t0 = dot_after(c, 0);
  EXPECT_EQ(count(t0, "shape=circle"), 9u);
  EXPECT_EQ(count(t0, "shape=box"), 0u);
  EXPECT_EQ(count(t0, "r\\d+ -> r\\d+;"), 8u);
  const std::string t1 = dot_after(c, 1);
  EXPECT_EQ(count(t1, "shape=circle"), 8u);
  EXPECT_NE(t1.find("label=\"h:6@6\""), std::string::npos);
  EXPECT_NE(t1.find("label=\"h:3@3\""), std::string::npos);
  EXPECT_EQ(count(t1, "style=dashed"), 2u);
}

TEST(Scenario, DeterministicOutputs) {
  ScenarioConfig c;
  c.graph = {GraphKind::kRandomConnected, 50, {}, 3, 0, 20};
  c.probes = {ProbeKind::kSampled, 50, 3, {}};
  c.probe_every = 4;
  c.seed = 3;
  c.adversary_seed = 3;
  c.stop_on_violation = false;
  auto render = [&] {
    std::ostringstream os;
    RunHooks hooks;
    hooks.on_phase = [&](std::size_t, NodeId, const HealingPhase& ph) { write_trace(os, ph); };
    const Metrics m = run_scenario(c, hooks);
    write_metrics_json(os, m);
    write_rows_csv(os, m);
    write_probes_csv(os, m);
    return os.str();
  };
  EXPECT_EQ(render(), render());
}

TEST(Scenario, InterleavedModeDeletesAndDelivers) {
  ScenarioConfig c;
  c.graph = {GraphKind::kRandomTree, 30, {}, 1, 0, 0};
  c.mode = RunMode::kInterleaved;
  c.deletions = 20;
  c.stop_on_violation = false;
  const Metrics m = run_scenario(c);
  EXPECT_EQ(m.rows.size(), 20u);
  EXPECT_GT(m.probes, 0u);
  EXPECT_EQ(m.probes, m.delivered + m.returned + m.discarded);
}
