#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cft/healing.hpp"
#include "cft/oracle.hpp"
#include "cft/routing.hpp"

namespace cft {

enum class StrategyKind : std::uint8_t {
  kRandomLive,
  kMaxDegreeFirst,
  kLeavesFirst,
  kNonLeavesFirst,
  kExplicitSequence,
};

const char* to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_string(const std::string& name);

struct AdversaryConfig {
  StrategyKind kind = StrategyKind::kRandomLive;
  std::uint64_t seed = 0;
  std::vector<NodeId> sequence;  // post-order ids, explicit strategy only

  friend bool operator==(const AdversaryConfig&, const AdversaryConfig&) = default;
};

/// Picks the next victim. Ties among candidates are broken by the seeded RNG.
class Adversary {
 public:
  explicit Adversary(AdversaryConfig config);

  /// Throws kExhausted when fewer than two nodes live or the sequence ran out,
  /// kPreconditionViolated when the sequence names a dead or unknown node.
  /// `excluded` nodes are never chosen by the non-explicit strategies.
  NodeId next(const Topology& t, const std::set<NodeId>& excluded = {});

 private:
  AdversaryConfig config_;
  std::mt19937_64 rng_;
  std::size_t pos_ = 0;
};

enum class GraphKind : std::uint8_t { kEdges, kRandomTree, kRandomConnected };

struct GraphSpec {
  GraphKind kind = GraphKind::kRandomTree;
  std::size_t n = 1;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // 1-based indices
  std::uint64_t seed = 0;
  std::size_t degree_cap = 0;
  std::size_t extra_edges = 0;  // randomConnected only

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

enum class ProbeKind : std::uint8_t { kNone, kAllPairs, kSampled, kExplicit };

struct ProbeSpec {
  ProbeKind kind = ProbeKind::kAllPairs;
  std::size_t count = 0;  // sampled
  std::uint64_t seed = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // 1-based indices

  friend bool operator==(const ProbeSpec&, const ProbeSpec&) = default;
};

enum class RunMode : std::uint8_t { kPhased, kInterleaved };
enum class CheckMode : std::uint8_t { kFull, kSampled };

/// A scenario in pre-labelling indices (1..n).
struct ScenarioConfig {
  GraphSpec graph;
  std::optional<std::size_t> root;  // nullopt = auto
  unsigned b = 2;
  StrategyKind adversary = StrategyKind::kRandomLive;
  std::uint64_t adversary_seed = 0;
  std::vector<std::size_t> sequence;  // explicit strategy, 1-based indices
  std::optional<std::size_t> deletions;  // nullopt = until one node is left
  ProbeSpec probes;
  std::size_t probe_every = 1;
  RunMode mode = RunMode::kPhased;
  CheckMode checks = CheckMode::kFull;
  std::uint64_t seed = 0;  // engine seed (delivery order shuffles)
  bool stop_on_violation = true;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct DeletionRow {
  std::size_t t = 0;
  NodeId deleted = kNoNode;
  bool is_leaf = false;
  std::size_t rounds = 0;
  std::size_t max_msgs = 0;
  std::size_t max_refs = 0;
  std::size_t deg_increase = 0;
  std::size_t diameter = 0;
  std::size_t max_msg_refs = 0;
  std::size_t over_budget = 0;  // nodes exceeding degree + 4 messages
};

struct ProbeRecord {
  std::size_t t = 0;
  NodeId s = kNoNode;
  NodeId w = kNoNode;
  RouteStatus status = RouteStatus::kDelivered;
  std::size_t logical = 0;
  std::size_t physical = 0;
  std::size_t forward = 0;
  std::size_t back = 0;
  std::size_t delta = 0;  // T0 distance
  std::size_t y = 0;
  std::size_t bound = 0;
  std::size_t tree_dist = 0;  // logical distance in T_t, delivered only
  std::size_t g0_dist = 0;
};

struct Violation {
  std::size_t t = 0;
  CheckId check = CheckId::kTreeShape;
  std::string counterexample;
};

struct Metrics {
  std::size_t n = 0;
  unsigned b = 2;
  NodeId root = kNoNode;
  std::size_t diameter_t0 = 0;
  std::size_t delta_t0 = 0;
  std::size_t max_heavy_children = 0;
  std::size_t y = 0;
  std::size_t max_degree_increase = 0;
  std::size_t degree_witness_t = 0;
  NodeId degree_witness_node = kNoNode;
  std::size_t max_diameter = 0;
  std::size_t max_rounds = 0;
  std::size_t max_msgs = 0;
  std::size_t max_msg_refs = 0;
  std::size_t max_refs = 0;
  std::size_t budget_violations = 0;  // phases with a node over degree + 4
  std::size_t round_violations = 0;   // phases over 5 micro-rounds
  std::size_t probes = 0;
  std::size_t delivered = 0;
  std::size_t returned = 0;
  std::size_t discarded = 0;
  std::size_t path_bound_violations = 0;
  std::size_t stretch_violations = 0;
  long long worst_slack = 0;  // min over delivered probes of bound - hops
  double max_stretch_g0 = 0;
  std::vector<std::size_t> checks_run = std::vector<std::size_t>(8, 0);
  std::vector<std::size_t> check_failures = std::vector<std::size_t>(8, 0);
  std::vector<DeletionRow> rows;
  std::vector<ProbeRecord> probe_log;
  std::vector<Violation> violations;
  std::vector<NodeId> id_of;  // pre-labelling index (0-based) -> id
};

/// Hooks for traces and renderings. All are optional.
struct RunHooks {
  std::function<void(std::size_t t, NodeId x, const HealingPhase&)> on_phase;
  std::function<void(std::size_t t, const Topology&)> on_checkpoint;
};

/// Builds the graph and labelled tree of a config; throws kConfigInvalid.
LabelledTree build_tree(const ScenarioConfig& config);

Metrics run_scenario(const ScenarioConfig& config, const RunHooks& hooks = {});

/// Writes one line per message: round, from, to, kind, refs (tab-separated).
void write_trace(std::ostream& os, const HealingPhase& phase);
void write_metrics_json(std::ostream& os, const Metrics& m);
void write_rows_csv(std::ostream& os, const Metrics& m);
void write_probes_csv(std::ostream& os, const Metrics& m);
/// Real nodes as circles, helpers as boxes "h:k@host"; dashed host links.
void write_dot(std::ostream& os, const Topology& t);

}  // namespace cft
