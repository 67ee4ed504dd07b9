#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cft/blueprint.hpp"

using namespace cft;

namespace {

std::vector<ChildSlot> slots(std::size_t k, std::uint64_t seed) {
  // Disjoint subtree intervals [d, id] in random order.
  std::vector<ChildSlot> out;
  NodeId next = 1;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const NodeId d = next;
    const NodeId id = static_cast<NodeId>(d + rng() % 4);
    out.push_back({id, d, static_cast<PortNumber>(i + 1)});
    next = id + 1;
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Root helper, one helper below it, then a balanced tree over k - 1 leaves.
std::size_t expected_depth(std::size_t k) { return k == 1 ? 1 : ceil_log2(k - 1) + 2; }

}  // namespace

TEST(Blueprint, CeilLog2) {
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(3), 2u);
  EXPECT_EQ(ceil_log2(8), 3u);
  EXPECT_EQ(ceil_log2(9), 4u);
}

TEST(Blueprint, EmptyAndSingle) {
  try {
    build_rt_blueprint({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyChildren);
  }
  const auto one = slots(1, 0);
  const RtBlueprint bp = build_rt_blueprint(one);
  EXPECT_EQ(bp.leaf_count(), 1u);
  EXPECT_EQ(bp.helper_count(), 1u);
  EXPECT_EQ(bp.root(), Vertex::helper_of(one[0].id));
  EXPECT_EQ(bp.depth(), 1u);
}

TEST(Blueprint, RootIsHelperOfLargestChild) {
  const auto s = slots(7, 3);
  const RtBlueprint bp = build_rt_blueprint(s);
  NodeId largest = 0;
  for (const auto& c : s) largest = std::max(largest, c.id);
  EXPECT_EQ(bp.root(), Vertex::helper_of(largest));
  EXPECT_EQ(bp.heir(), largest);
}

class BlueprintSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(BlueprintSizes, ShapeInvariants) {
  const std::size_t k = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = slots(k, seed);
    const RtBlueprint bp = build_rt_blueprint(s);
    EXPECT_EQ(bp.validate(), "");
    EXPECT_EQ(bp.leaf_count(), k);
    EXPECT_EQ(bp.helper_count(), k);
    EXPECT_EQ(bp.depth(), expected_depth(k));
    std::vector<NodeId> ids;
    for (const auto& c : s) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(bp.leaves_in_order(), ids);
    // Every helper is hosted by one of the children, at most one each.
    for (const auto& [v, node] : bp.nodes()) {
      if (!v.helper) continue;
      EXPECT_TRUE(std::binary_search(ids.begin(), ids.end(), v.host()));
      EXPECT_EQ(node.child_count(), v == *bp.root() ? 1u : 2u);
      // Range spans exactly the subtree intervals of the leaves below.
      NodeId lo = 0, hi = 0;
      std::vector<Vertex> stack{v};
      while (!stack.empty()) {
        const Vertex u = stack.back();
        stack.pop_back();
        if (!u.helper || !bp.contains(u) || bp.at(u).child_count() == 0) {
          for (const auto& c : s) {
            if (c.id != u.id || u.helper) continue;
            lo = lo == 0 ? c.d : std::min(lo, c.d);
            hi = std::max(hi, c.id);
          }
          continue;
        }
        for (const auto& c : bp.at(u).child) {
          if (c) stack.push_back(*c);
        }
      }
      EXPECT_EQ(node.range, (IdRange{lo, hi})) << to_string(v);
    }
  }
}

TEST_P(BlueprintSizes, LeafRemovalKeepsOrder) {
  const std::size_t k = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = slots(k, seed + 100);
    RtBlueprint bp = build_rt_blueprint(s);
    std::vector<NodeId> ids;
    for (const auto& c : s) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    std::mt19937_64 rng(seed);
    while (ids.size() > 1) {
      const std::size_t i = rng() % ids.size();
      const NodeId x = ids[i];
      const LeafRemoval r = bp.remove_leaf(x);
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(i));
      EXPECT_EQ(r.leaf, Vertex::real(x));
      EXPECT_EQ(bp.validate(), "") << "after removing " << x;
      EXPECT_EQ(bp.leaves_in_order(), ids);
      EXPECT_FALSE(bp.contains(Vertex::helper_of(x)));
      EXPECT_EQ(bp.helper_count(), ids.size());
      EXPECT_LE(bp.depth(), expected_depth(k));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Ks, BlueprintSizes, ::testing::Values(2, 3, 4, 5, 8, 9, 16, 17, 40));
