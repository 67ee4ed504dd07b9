#include <gtest/gtest.h>

#include <functional>

#include "cft/preprocess.hpp"

using namespace cft;

namespace {

Graph nine_node_graph() {
  Graph g(9);
  for (auto [u, v] : std::vector<std::pair<int, int>>{
           {9, 7}, {9, 8}, {7, 3}, {7, 6}, {3, 1}, {3, 2}, {6, 4}, {6, 5}}) {
    g.add_edge(u - 1, v - 1);
  }
  return g;
}

// Recursive reference for the numbering: heavy children first, port order
// within each class.
struct RefNumbering {
  std::vector<std::size_t> weight;
  std::vector<bool> heavy;
  std::vector<NodeId> id;
};

RefNumbering reference_numbering(const RootedTree& t, unsigned b) {
  RefNumbering r;
  const std::size_t n = t.size();
  r.weight.assign(n, 0);
  r.heavy.assign(n, false);
  r.id.assign(n, 0);
  std::function<std::size_t(std::size_t)> weigh = [&](std::size_t v) {
    std::size_t w = 1;
    for (auto c : t.children[v]) w += weigh(c);
    return r.weight[v] = w;
  };
  weigh(t.root);
  r.heavy[t.root] = true;
  for (std::size_t v = 0; v < n; ++v) {
    for (auto c : t.children[v]) r.heavy[c] = r.weight[c] * b >= r.weight[v];
  }
  NodeId next = 1;
  std::function<void(std::size_t)> number = [&](std::size_t v) {
    for (auto c : t.children[v]) {
      if (r.heavy[c]) number(c);
    }
    for (auto c : t.children[v]) {
      if (!r.heavy[c]) number(c);
    }
    r.id[v] = next++;
  };
  number(t.root);
  return r;
}

}  // namespace

TEST(Preprocess, NineNodeNumbering) {
  const LabelledTree t = preprocess(nine_node_graph(), 8, 2);
  ASSERT_EQ(t.n, 9u);
  EXPECT_EQ(t.root, 9u);
  // The example is laid out so that indices coincide with post-order ids.
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(t.id_of[i], i + 1);
  EXPECT_EQ(t.parent[7], 9u);
  EXPECT_EQ(t.parent[8], 9u);
  EXPECT_EQ(t.parent[1], 3u);
  EXPECT_EQ(t.weight[9], 9u);
  EXPECT_EQ(t.weight[7], 7u);
  EXPECT_EQ(t.weight[3], 3u);
  EXPECT_TRUE(t.heavy[7]);
  EXPECT_FALSE(t.heavy[8]);
  EXPECT_FALSE(t.heavy[3]);
  EXPECT_FALSE(t.heavy[6]);
}

TEST(Preprocess, NineNodeFields) {
  const LabelledTree t = preprocess(nine_node_graph(), 8, 2);
  const TzFields& r = t.tz[9];
  EXPECT_EQ(r.d, 1u);
  EXPECT_EQ(r.c, 8u);
  EXPECT_EQ(r.heavy, std::vector<NodeId>{7});
  EXPECT_EQ(r.heavy_ports, std::vector<PortNumber>{1});
  EXPECT_EQ(t.tz[7].d, 1u);
  EXPECT_EQ(t.tz[7].c, 1u);
  EXPECT_TRUE(t.tz[7].heavy.empty());
  EXPECT_EQ(t.tz[1].c, 2u);
  EXPECT_EQ(t.label[9], RoutingLabel{});
  EXPECT_EQ(t.label[7], RoutingLabel{});
  EXPECT_EQ(t.label[8], RoutingLabel{2});
  EXPECT_EQ(t.label[1], (RoutingLabel{1, 1}));
  EXPECT_EQ(t.label[5], (RoutingLabel{2, 2}));
  EXPECT_EQ(t.tz[6].ell, 1u);
}

TEST(Preprocess, DisconnectedGraphThrows) {
  Graph g(3);
  g.add_edge(0, 1);
  try {
    build_bfs_tree(g, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisconnectedGraph);
  }
}

TEST(Preprocess, SingleNode) {
  const LabelledTree t = preprocess(Graph(1), 0, 2);
  EXPECT_EQ(t.n, 1u);
  EXPECT_EQ(t.root, 1u);
  EXPECT_EQ(t.tz[1].d, 1u);
}

class PreprocessRandom : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PreprocessRandom, MatchesReferenceNumbering) {
  const std::uint64_t seed = GetParam();
  for (unsigned b : {2u, 3u, 5u}) {
    const std::size_t n = 2 + seed * 7 % 150;
    const Graph g = random_connected(n, seed, n / 3);
    const RootedTree rt = build_bfs_tree(g, 0);
    const RefNumbering ref = reference_numbering(rt, b);
    const Numbering num = classify_and_number(rt, b);
    EXPECT_EQ(num.weight, ref.weight);
    EXPECT_EQ(num.heavy, ref.heavy);
    EXPECT_EQ(num.id, ref.id);
  }
}

TEST_P(PreprocessRandom, FieldProperties) {
  const std::uint64_t seed = GetParam();
  const std::size_t n = 2 + seed * 13 % 200;
  const unsigned b = 2 + seed % 3;
  const LabelledTree t = preprocess(random_tree(n, seed), 0, b);
  for (NodeId v = 1; v <= t.n; ++v) {
    const TzFields& f = t.tz[v];
    // Subtree of v is exactly [d, v].
    std::size_t count = 0;
    for (NodeId w = 1; w <= t.n; ++w) {
      NodeId a = w;
      while (a != kNoNode && a != v) a = t.parent[a];
      if (a == v) {
        ++count;
        EXPECT_GE(w, f.d);
        EXPECT_LE(w, v);
      }
    }
    EXPECT_EQ(count, v - f.d + 1);
    // At most b heavy children, and the light ones are numbered after them.
    EXPECT_LE(f.heavy.size(), b);
    for (NodeId c : t.children[v]) {
      if (!t.heavy[c]) {
        EXPECT_GE(c - t.weight[c] + 1, f.c);
      }
    }
    // Label length is the number of light ancestors-or-self below the root.
    std::size_t light = 0;
    for (NodeId a = v; t.parent[a] != kNoNode; a = t.parent[a]) light += t.heavy[a] ? 0 : 1;
    EXPECT_EQ(t.label[v].size(), light);
    std::size_t power = 1;
    for (std::size_t i = 0; i < light; ++i) power *= b;
    EXPECT_LE(power, t.n);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, PreprocessRandom, ::testing::Range<std::uint64_t>(0, 25));
