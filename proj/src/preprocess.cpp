#include "cft/preprocess.hpp"

#include <algorithm>
#include <deque>

namespace cft {

void Graph::add_edge(std::size_t u, std::size_t v) {
  if (u >= size() || v >= size()) {
    throw Error(ErrorCode::kUnknownNode,
                "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  if (u == v || has_edge(u, v)) return;
  adj_[u].push_back(v);
  adj_[v].push_back(u);
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  const auto& a = adj_.at(u);
  return std::find(a.begin(), a.end(), v) != a.end();
}

std::size_t Graph::edge_count() const {
  std::size_t sum = 0;
  for (const auto& a : adj_) sum += a.size();
  return sum / 2;
}

Graph random_tree(std::size_t n, std::uint64_t seed, std::size_t degree_cap) {
  Graph g(n);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> deg(n, 0);
  for (std::size_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, v - 1);
    std::size_t u = pick(rng);
    if (degree_cap > 0 && deg[u] >= degree_cap) {
      std::vector<std::size_t> open;
      for (std::size_t w = 0; w < v; ++w) {
        if (deg[w] < degree_cap) open.push_back(w);
      }
      if (!open.empty()) {
        std::uniform_int_distribution<std::size_t> alt(0, open.size() - 1);
        u = open[alt(rng)];
      }
    }
    g.add_edge(u, v);
    ++deg[u];
    ++deg[v];
  }
  return g;
}

Graph random_connected(std::size_t n, std::uint64_t seed,
                       std::size_t extra_edges, std::size_t degree_cap) {
  Graph g = random_tree(n, seed, degree_cap);
  if (n < 3) return g;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t max_edges = n * (n - 1) / 2;
  std::size_t target = std::min(max_edges, g.edge_count() + extra_edges);
  while (g.edge_count() < target) {
    std::size_t u = pick(rng);
    std::size_t v = pick(rng);
    if (u != v) g.add_edge(u, v);
  }
  return g;
}

RootedTree build_bfs_tree(const Graph& graph, std::size_t root) {
  const std::size_t n = graph.size();
  if (root >= n) throw Error(ErrorCode::kUnknownNode, "root out of range");
  RootedTree t;
  t.root = root;
  t.parent.assign(n, std::nullopt);
  t.children.assign(n, {});
  t.depth.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{root};
  seen[root] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : graph.neighbours(u)) {
      if (seen[v]) continue;
      seen[v] = true;
      ++reached;
      t.parent[v] = u;
      t.depth[v] = t.depth[u] + 1;
      t.children[u].push_back(v);
      queue.push_back(v);
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::kDisconnectedGraph,
                std::to_string(n - reached) + " nodes unreachable from root");
  }
  return t;
}

namespace {

std::vector<std::size_t> bfs_order(const RootedTree& tree) {
  std::vector<std::size_t> order{tree.root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t c : tree.children[order[i]]) order.push_back(c);
  }
  return order;
}

}  // namespace

Numbering classify_and_number(const RootedTree& tree, unsigned b) {
  const std::size_t n = tree.size();
  Numbering num;
  num.weight.assign(n, 1);
  num.heavy.assign(n, false);
  num.id.assign(n, kNoNode);

  auto order = bfs_order(tree);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (auto p = tree.parent[*it]) num.weight[*p] += num.weight[*it];
  }
  num.heavy[tree.root] = true;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t c : tree.children[v]) {
      num.heavy[c] = num.weight[c] * b >= num.weight[v];
    }
  }

  // Iterative post-order; heavy children first, each class in port order.
  NodeId next = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{tree.root, 0}};
  std::vector<std::vector<std::size_t>> visit(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t c : tree.children[v]) {
      if (num.heavy[c]) visit[v].push_back(c);
    }
    for (std::size_t c : tree.children[v]) {
      if (!num.heavy[c]) visit[v].push_back(c);
    }
  }
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < visit[v].size()) {
      std::size_t c = visit[v][i++];
      stack.push_back({c, 0});
    } else {
      num.id[v] = next++;
      stack.pop_back();
    }
  }
  return num;
}

std::size_t LabelledTree::max_degree() const {
  std::size_t best = 0;
  for (NodeId v = 1; v <= n; ++v) best = std::max(best, degree(v));
  return best;
}

void compute_tz_fields(LabelledTree& t) {
  t.tz.assign(t.n + 1, {});
  t.label.assign(t.n + 1, {});
  for (NodeId v = 1; v <= t.n; ++v) {
    TzFields& f = t.tz[v];
    f.v = v;
    f.d = static_cast<NodeId>(v - t.weight[v] + 1);
    f.c = v + 1;
    NodeId first_light = kNoNode;
    std::vector<std::pair<NodeId, PortNumber>> heavy;
    for (std::size_t i = 0; i < t.children[v].size(); ++i) {
      NodeId c = t.children[v][i];
      auto port = static_cast<PortNumber>(i + 1);
      if (t.heavy[c]) {
        heavy.push_back({c, port});
      } else if (first_light == kNoNode || c < first_light) {
        first_light = c;
      }
    }
    if (first_light != kNoNode) {
      f.c = static_cast<NodeId>(first_light - t.weight[first_light] + 1);
    }
    std::sort(heavy.begin(), heavy.end());
    for (auto [c, port] : heavy) {
      f.heavy.push_back(c);
      f.heavy_ports.push_back(port);
    }
  }
  // Labels top-down: parents have larger ids, so descending id order works.
  for (NodeId v = static_cast<NodeId>(t.n); v >= 1; --v) {
    NodeId p = t.parent[v];
    if (p != kNoNode) {
      t.label[v] = t.label[p];
      if (!t.heavy[v]) t.label[v].push_back(t.port_at_parent[v]);
    }
    t.tz[v].ell = t.label[v].size();
  }
}

LabelledTree preprocess(const Graph& graph, std::size_t root, unsigned b) {
  if (b < 2) throw Error(ErrorCode::kConfigInvalid, "b must be at least 2");
  RootedTree rooted = build_bfs_tree(graph, root);
  Numbering num = classify_and_number(rooted, b);
  const std::size_t n = graph.size();

  LabelledTree t;
  t.n = n;
  t.b = b;
  t.root = num.id[root];
  t.parent.assign(n + 1, kNoNode);
  t.children.assign(n + 1, {});
  t.port_at_parent.assign(n + 1, kParentPort);
  t.weight.assign(n + 1, 0);
  t.heavy.assign(n + 1, false);
  t.index_of.assign(n + 1, 0);
  t.id_of = num.id;
  t.graph_adj.assign(n + 1, {});
  for (std::size_t i = 0; i < n; ++i) {
    NodeId v = num.id[i];
    t.index_of[v] = i;
    t.weight[v] = num.weight[i];
    t.heavy[v] = num.heavy[i];
    if (auto p = rooted.parent[i]) t.parent[v] = num.id[*p];
    for (std::size_t k = 0; k < rooted.children[i].size(); ++k) {
      NodeId c = num.id[rooted.children[i][k]];
      t.children[v].push_back(c);
      t.port_at_parent[c] = static_cast<PortNumber>(k + 1);
    }
    for (std::size_t j : graph.neighbours(i)) t.graph_adj[v].push_back(num.id[j]);
  }
  compute_tz_fields(t);
  return t;
}

}  // namespace cft
