#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "cft/healing.hpp"
#include "cft/oracle.hpp"

using namespace cft;

namespace {

LabelledTree nine_node() {
  Graph g(9);
  for (auto [u, v] : std::vector<std::pair<int, int>>{
           {9, 7}, {9, 8}, {7, 3}, {7, 6}, {3, 1}, {3, 2}, {6, 4}, {6, 5}}) {
    g.add_edge(u - 1, v - 1);
  }
  return preprocess(g, 8, 2);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

// Degree of each host in T0 by counting tree edges directly.
std::vector<std::size_t> t0_degrees(const LabelledTree& t) {
  std::vector<std::size_t> deg(t.n + 1, 0);
  for (NodeId v = 1; v <= t.n; ++v) {
    if (t.parent[v] != kNoNode) {
      ++deg[v];
      ++deg[t.parent[v]];
    }
  }
  return deg;
}

}  // namespace

TEST(Topology, DeletionErrors) {
  const LabelledTree t = nine_node();
  Topology topo(t);
  EXPECT_EQ(code_of([&] { topo.delete_node(10); }), ErrorCode::kUnknownNode);
  topo.delete_node(1);
  EXPECT_EQ(code_of([&] { topo.delete_node(1); }), ErrorCode::kAlreadyDeleted);
  EXPECT_EQ(code_of([&] { topo.add_helper(1, {1, 1}); }), ErrorCode::kDeadEndpoint);
}

TEST(Topology, LastNodeCannotBeDeleted) {
  const LabelledTree t = preprocess(random_tree(2, 0), 0, 2);
  Topology topo(t);
  topo.delete_node(1);
  EXPECT_EQ(code_of([&] { topo.delete_node(2); }), ErrorCode::kLastNode);
}

TEST(Topology, SnapshotMidPhaseThrows) {
  const LabelledTree t = nine_node();
  Topology topo(t);
  topo.begin_healing();
  EXPECT_EQ(code_of([&] { (void)topo.snapshot(); }), ErrorCode::kHealingInProgress);
  topo.end_healing();
  EXPECT_EQ(topo.snapshot(), topo);
}

TEST(Healing, NineNodeReconstruction) {
  const LabelledTree t = nine_node();
  HealingEngine eng(t, 0);
  const HealingPhase ph = eng.delete_and_heal(7);
  const Topology& topo = eng.topology();
  EXPECT_EQ(ph.notified, (std::set<NodeId>{3, 6, 9}));
  ASSERT_TRUE(topo.has_helper(6));
  ASSERT_TRUE(topo.has_helper(3));
  EXPECT_FALSE(topo.has_helper(7));
  EXPECT_EQ(topo.at(Vertex::helper_of(6)).parent, Vertex::real(9));
  EXPECT_EQ(topo.at(Vertex::helper_of(3)).parent, Vertex::helper_of(6));
  EXPECT_EQ(topo.at(Vertex::helper_of(6)).range, (IdRange{1, 6}));
  EXPECT_EQ(eng.nonleaf_deletions(), 1u);
  const Oracle oracle(t);
  EXPECT_TRUE(oracle.tree_shape(topo).passed);
  EXPECT_TRUE(oracle.bst(topo).passed);
}

TEST(Healing, LeafDeletionSendsNoReconstruction) {
  const LabelledTree t = nine_node();
  HealingEngine eng(t, 0);
  const HealingPhase ph = eng.delete_and_heal(8);
  EXPECT_TRUE(ph.was_leaf);
  EXPECT_EQ(eng.nonleaf_deletions(), 0u);
  EXPECT_EQ(eng.topology().vertices().size(), 8u);
  EXPECT_EQ(code_of([&] { eng.delete_and_heal(8); }), ErrorCode::kAlreadyDeleted);
}

TEST(Oracle, CorruptedHelperIsCaught) {
  const LabelledTree t = nine_node();
  HealingEngine eng(t, 0);
  eng.delete_and_heal(7);
  Topology topo = eng.topology();
  const Oracle oracle(t);
  ASSERT_TRUE(oracle.bst(topo).passed);
  // Swap the two children of a two-child helper.
  Vertex h{};
  for (const auto& [v, tv] : topo.vertices()) {
    if (v.helper && tv.child_count() == 2) h = v;
  }
  ASSERT_TRUE(h.valid());
  const Vertex left = *topo.at(h).child[0];
  const Vertex right = *topo.at(h).child[1];
  topo.detach(left);
  topo.detach(right);
  topo.place(right, {h, 1});
  topo.place(left, {h, 2});
  EXPECT_TRUE(oracle.tree_shape(topo).passed);
  const CheckResult r = oracle.bst(topo);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.counterexample.empty());
}

TEST(Oracle, NineNodeBounds) {
  const LabelledTree t = nine_node();
  const Oracle oracle(t);
  EXPECT_EQ(oracle.diameter_t0(), 4u);
  EXPECT_EQ(oracle.max_degree_t0(), 3u);
  EXPECT_EQ(oracle.log_delta(), 2u);
  EXPECT_EQ(oracle.dist_t0(8, 1), 4u);
  EXPECT_EQ(oracle.path_bound(8, 1, 1), 4u + 2u);
  EXPECT_EQ(oracle.diameter_bound(), 4u * 3u);
}

class HealingRandom : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(HealingRandom, InvariantsHoldUntilOneNodeLeft) {
  const std::uint64_t seed = GetParam();
  const std::size_t n = 5 + seed * 11 % 90;
  const unsigned b = 2 + seed % 2;
  const LabelledTree t = preprocess(random_connected(n, seed, n / 4), 0, b);
  const Oracle oracle(t);
  const auto deg0 = t0_degrees(t);
  HealingEngine eng(t, seed);
  std::mt19937_64 rng(seed * 31 + 1);
  while (eng.topology().live_count() > 1) {
    const auto live = eng.topology().live_nodes();
    const NodeId x = live[rng() % live.size()];
    const HealingPhase ph = eng.delete_and_heal(x);
    const Topology& topo = eng.topology();
    ASSERT_FALSE(topo.contains(Vertex::real(x)));
    ASSERT_FALSE(topo.has_helper(x));
    for (const auto& check : {oracle.tree_shape(topo), oracle.bst(topo), oracle.degree(topo),
                              oracle.diameter(topo), oracle.memory(topo, eng.states()),
                              oracle.helpers(topo, eng.states())}) {
      ASSERT_TRUE(check.passed) << "after deleting " << x << ": " << check.counterexample;
    }
    for (NodeId v : topo.live_nodes()) EXPECT_LE(topo.degree(v), deg0[v] + 3) << v;
    for (const auto& m : ph.messages) {
      EXPECT_NE(m.from, x);
      EXPECT_NE(m.to, x);
      EXPECT_GE(m.round, 1u);
      EXPECT_LE(m.round, ph.rounds);
    }
    EXPECT_LE(ph.max_stored_refs, 2 * b + 40);
  }
}

TEST_P(HealingRandom, SameSeedSameMessages) {
  const std::uint64_t seed = GetParam();
  const LabelledTree t = preprocess(random_tree(40, seed), 0, 2);
  HealingEngine a(t, seed);
  HealingEngine b(t, seed);
  std::mt19937_64 rng(seed);
  while (a.topology().live_count() > 1) {
    const auto live = a.topology().live_nodes();
    const NodeId x = live[rng() % live.size()];
    EXPECT_EQ(a.delete_and_heal(x).messages, b.delete_and_heal(x).messages);
    EXPECT_EQ(a.topology(), b.topology());
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, HealingRandom, ::testing::Range<std::uint64_t>(0, 20));
