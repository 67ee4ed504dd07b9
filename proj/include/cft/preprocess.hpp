#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cft/types.hpp"

namespace cft {

/// Undirected input graph G0 over pre-labelling indices 0..n-1.
/// Adjacency order is insertion order; BFS assigns child ports in it.
class Graph {
 public:
  explicit Graph(std::size_t n = 0) : adj_(n) {}

  std::size_t size() const { return adj_.size(); }
  void add_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const;
  const std::vector<std::size_t>& neighbours(std::size_t u) const {
    return adj_.at(u);
  }
  std::size_t edge_count() const;

 private:
  std::vector<std::vector<std::size_t>> adj_;
};

/// Uniform random recursive tree; each new node attaches to an earlier node
/// whose degree is below `degree_cap` (0 = uncapped).
Graph random_tree(std::size_t n, std::uint64_t seed, std::size_t degree_cap = 0);
/// Random tree plus `extra_edges` random non-tree edges.
Graph random_connected(std::size_t n, std::uint64_t seed,
                       std::size_t extra_edges, std::size_t degree_cap = 0);

struct RootedTree {
  std::size_t root = 0;
  std::vector<std::optional<std::size_t>> parent;
  /// children[v][i] sits at port i+1 of v.
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::size_t> depth;

  std::size_t size() const { return parent.size(); }
};

/// BFS spanning tree; throws kDisconnectedGraph.
RootedTree build_bfs_tree(const Graph& graph, std::size_t root);

struct Numbering {
  std::vector<std::size_t> weight;  // by index
  std::vector<bool> heavy;          // by index; root is heavy
  std::vector<NodeId> id;           // index -> post-order id
};

/// Heavy-first post-order numbering. Within each class children are visited
/// in ascending port order.
Numbering classify_and_number(const RootedTree& tree, unsigned b);

/// Per-node interval routing state.
struct TzFields {
  NodeId v = kNoNode;
  NodeId d = kNoNode;  // smallest descendant
  NodeId c = kNoNode;  // smallest descendant of first light child, else v+1
  std::vector<NodeId> heavy;           // ascending
  std::vector<PortNumber> heavy_ports;  // aligned with `heavy`
  PortNumber parent_port = kParentPort;
  std::size_t ell = 0;

  friend bool operator==(const TzFields&, const TzFields&) = default;
};

/// Ports toward the light nodes on the root-to-v path.
using RoutingLabel = std::vector<PortNumber>;

/// The preprocessed tree T0 expressed in post-order ids.
struct LabelledTree {
  std::size_t n = 0;
  unsigned b = 2;
  NodeId root = kNoNode;
  // All vectors are indexed by NodeId; slot 0 is unused.
  std::vector<NodeId> parent;
  std::vector<std::vector<NodeId>> children;  // children[v][i] at port i+1
  std::vector<PortNumber> port_at_parent;
  std::vector<std::size_t> weight;
  std::vector<bool> heavy;
  std::vector<std::size_t> index_of;  // id -> pre-labelling index
  std::vector<NodeId> id_of;          // pre-labelling index -> id
  std::vector<TzFields> tz;
  std::vector<RoutingLabel> label;
  /// G0 adjacency in id space; read-only, never used for routing.
  std::vector<std::vector<NodeId>> graph_adj;

  std::size_t degree(NodeId v) const {
    return children[v].size() + (parent[v] == kNoNode ? 0 : 1);
  }
  NodeId child_at(NodeId v, PortNumber port) const {
    return children[v].at(port - 1);
  }
  std::size_t max_degree() const;
};

/// Fills tz and label for every node of an already-numbered tree.
void compute_tz_fields(LabelledTree& tree);

/// BFS tree, numbering and TZ setup in one pass.
LabelledTree preprocess(const Graph& graph, std::size_t root, unsigned b);

}  // namespace cft
