#include "cft/harness.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace cft {

namespace {

constexpr const char* kStrategyNames[] = {"RandomLive", "MaxDegreeFirst", "LeavesFirst",
                                          "NonLeavesFirst", "ExplicitSequence"};

/// Index with the smallest eccentricity in G0; ties go to the smaller index.
std::size_t graph_center(const Graph& g) {
  const std::size_t n = g.size();
  std::size_t best = 0;
  std::size_t best_ecc = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> d(n, std::numeric_limits<std::size_t>::max());
    std::queue<std::size_t> q;
    d[s] = 0;
    q.push(s);
    std::size_t ecc = 0;
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop();
      ecc = std::max(ecc, d[v]);
      for (std::size_t u : g.neighbours(v)) {
        if (d[u] == std::numeric_limits<std::size_t>::max()) {
          d[u] = d[v] + 1;
          q.push(u);
        }
      }
    }
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = s;
    }
  }
  return best;
}

}  // namespace

const char* to_string(StrategyKind kind) {
  return kStrategyNames[static_cast<std::size_t>(kind)];
}

std::optional<StrategyKind> strategy_from_string(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kStrategyNames); ++i) {
    if (name == kStrategyNames[i]) return static_cast<StrategyKind>(i);
  }
  return std::nullopt;
}

Adversary::Adversary(AdversaryConfig config)
    : config_(std::move(config)), rng_(config_.seed) {}

NodeId Adversary::next(const Topology& t, const std::set<NodeId>& excluded) {
  if (t.live_count() < 2) throw Error(ErrorCode::kExhausted, "fewer than two live nodes");
  if (config_.kind == StrategyKind::kExplicitSequence) {
    if (pos_ >= config_.sequence.size()) throw Error(ErrorCode::kExhausted, "sequence ended");
    const NodeId x = config_.sequence[pos_++];
    if (x < 1 || x > t.n() || !t.alive(x)) {
      throw Error(ErrorCode::kPreconditionViolated,
                  "sequence entry " + std::to_string(pos_) + " names dead or unknown node " +
                      std::to_string(x));
    }
    return x;
  }
  std::vector<NodeId> pool;
  for (NodeId v : t.live_nodes()) {
    if (!excluded.count(v)) pool.push_back(v);
  }
  if (pool.empty()) throw Error(ErrorCode::kExhausted, "every live node is excluded");
  std::vector<NodeId> cand;
  switch (config_.kind) {
    case StrategyKind::kMaxDegreeFirst: {
      std::size_t best = 0;
      for (NodeId v : pool) best = std::max(best, t.degree(v));
      for (NodeId v : pool) {
        if (t.degree(v) == best) cand.push_back(v);
      }
      break;
    }
    case StrategyKind::kLeavesFirst:
      for (NodeId v : pool) {
        if (t.is_leaf(v)) cand.push_back(v);
      }
      break;
    case StrategyKind::kNonLeavesFirst:
      for (NodeId v : pool) {
        if (!t.is_leaf(v)) cand.push_back(v);
      }
      break;
    default:
      break;
  }
  if (cand.empty()) cand = pool;
  return cand[rng_() % cand.size()];
}

LabelledTree build_tree(const ScenarioConfig& c) {
  const GraphSpec& gs = c.graph;
  if (gs.n < 1) throw Error(ErrorCode::kConfigInvalid, "graph.n must be at least 1");
  if (c.b < 2) throw Error(ErrorCode::kConfigInvalid, "b must be at least 2");
  Graph g(gs.n);
  switch (gs.kind) {
    case GraphKind::kEdges:
      for (const auto& [u, v] : gs.edges) {
        if (u < 1 || u > gs.n || v < 1 || v > gs.n || u == v) {
          throw Error(ErrorCode::kConfigInvalid, "graph.edges has invalid edge [" +
                                                     std::to_string(u) + "," +
                                                     std::to_string(v) + "]");
        }
        g.add_edge(u - 1, v - 1);
      }
      break;
    case GraphKind::kRandomTree:
      g = random_tree(gs.n, gs.seed, gs.degree_cap);
      break;
    case GraphKind::kRandomConnected:
      g = random_connected(gs.n, gs.seed, gs.extra_edges, gs.degree_cap);
      break;
  }
  std::size_t root = 0;
  if (c.root) {
    if (*c.root < 1 || *c.root > gs.n) {
      throw Error(ErrorCode::kConfigInvalid, "root " + std::to_string(*c.root) + " out of range");
    }
    root = *c.root - 1;
  } else {
    root = graph_center(g);
  }
  try {
    return preprocess(g, root, c.b);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDisconnectedGraph) {
      throw Error(ErrorCode::kConfigInvalid, std::string("graph: ") + e.what());
    }
    throw;
  }
}

}  // namespace cft
