#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>

#include "cft/healing.hpp"
#include "cft/routing.hpp"

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

std::vector<Vertex> path_of(std::initializer_list<Vertex> vs) { return vs; }

constexpr Vertex R(NodeId v) { return Vertex::real(v); }
constexpr Vertex H(NodeId v) { return Vertex::helper_of(v); }

// Logical distance in T_t by BFS over parent/child links.
std::map<Vertex, std::size_t> bfs(const Topology& t, const Vertex& from) {
  std::map<Vertex, std::size_t> dist{{from, 0}};
  std::queue<Vertex> q;
  q.push(from);
  while (!q.empty()) {
    const Vertex v = q.front();
    q.pop();
    std::vector<Vertex> next = t.children(v);
    if (t.at(v).parent) next.push_back(*t.at(v).parent);
    for (const Vertex& u : next) {
      if (dist.emplace(u, dist[v] + 1).second) q.push(u);
    }
  }
  return dist;
}

}  // namespace

TEST(HeaderCodec, RoundTrip) {
  PacketHeader h;
  h.pairs.push_back({70000, {1, 2, 65535}});
  h.pairs.push_back({3, {}});
  h.payload = {9, 8, 7};
  const auto bytes = encode_header(h);
  EXPECT_EQ(bytes.size(), 1u + (4 + 2 + 6) + (4 + 2) + 3);
  EXPECT_EQ(bytes[0], 2);
  // Little-endian target 70000 = 0x00011170.
  EXPECT_EQ(bytes[1], 0x70);
  EXPECT_EQ(bytes[2], 0x11);
  EXPECT_EQ(bytes[3], 0x01);
  EXPECT_EQ(bytes[4], 0x00);
  EXPECT_EQ(decode_header(bytes), h);
}

TEST(HeaderCodec, RandomRoundTrips) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    PacketHeader h;
    const int pairs = 1 + static_cast<int>(rng() % 2);
    for (int p = 0; p < pairs; ++p) {
      HeaderPair hp;
      hp.target = static_cast<NodeId>(rng());
      hp.label.resize(rng() % 20);
      for (auto& port : hp.label) port = static_cast<PortNumber>(rng());
      h.pairs.push_back(hp);
    }
    h.payload.resize(rng() % 10);
    for (auto& byte : h.payload) byte = static_cast<std::uint8_t>(rng());
    EXPECT_EQ(decode_header(encode_header(h)), h);
  }
}

TEST(HeaderCodec, Errors) {
  PacketHeader empty;
  EXPECT_THROW(encode_header(empty), Error);
  const std::vector<std::uint8_t> zero{0};
  try {
    decode_header(zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPairCountOutOfRange);
  }
  const std::vector<std::uint8_t> truncated{1, 5, 0, 0, 0, 2, 0, 1};
  try {
    decode_header(truncated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedHeader);
  }
  EXPECT_THROW(decode_header(std::vector<std::uint8_t>{}), Error);
}

TEST(HeaderCodec, SizeForFiveHundredTwelveNodes) {
  const LabelledTree t = preprocess(random_tree(512, 11), 0, 2);
  std::size_t longest = 0;
  for (NodeId v = 1; v <= t.n; ++v) longest = std::max(longest, t.label[v].size());
  EXPECT_LE(longest, 9u);
  for (NodeId s = 1; s <= t.n; s += 17) {
    for (NodeId w = 1; w <= t.n; w += 13) {
      PacketHeader h;
      h.pairs = {{w, t.label[w]}, {s, t.label[s]}};
      EXPECT_LE(encode_header(h).size(), 1u + 2 * (4 + 2 + 2 * 9));
    }
  }
}

TEST(TzStep, NineNodeDecisions) {
  const LabelledTree t = nine_node();
  EXPECT_EQ(tz_step(t.tz[9], 9, t.label[9]).kind, ActionKind::kDeliver);
  EXPECT_EQ(tz_step(t.tz[9], 1, t.label[1]), (RouteAction{ActionKind::kForwardPort, 1}));
  EXPECT_EQ(tz_step(t.tz[9], 8, t.label[8]), (RouteAction{ActionKind::kForwardPort, 2}));
  EXPECT_EQ(tz_step(t.tz[7], 5, t.label[5]), (RouteAction{ActionKind::kForwardPort, 2}));
  EXPECT_EQ(tz_step(t.tz[3], 5, t.label[5]), (RouteAction{ActionKind::kForwardPort, 0}));
  EXPECT_EQ(tz_step(t.tz[8], 1, t.label[1]), (RouteAction{ActionKind::kForwardPort, 0}));
  try {
    tz_step(t.tz[7], 1, RoutingLabel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedLabel);
  }
}

TEST(Routing, NineNodeBeforeAndAfterDeletion) {
  const LabelledTree t = nine_node();
  HealingEngine eng(t, 1);
  RouteOutcome o = route_packet(eng.topology(), t, 8, 1);
  EXPECT_EQ(o.status, RouteStatus::kDelivered);
  EXPECT_EQ(o.forward, path_of({R(8), R(9), R(7), R(3), R(1)}));
  EXPECT_EQ(o.logical_hops, 4u);

  const HealingPhase ph = eng.delete_and_heal(7);
  EXPECT_FALSE(ph.was_leaf);
  EXPECT_LE(ph.rounds, 5u);
  o = route_packet(eng.topology(), t, 8, 1);
  EXPECT_EQ(o.status, RouteStatus::kDelivered);
  EXPECT_EQ(o.forward, path_of({R(8), R(9), H(6), H(3), R(3), R(1)}));
  EXPECT_EQ(o.logical_hops, 5u);

  o = route_packet(eng.topology(), t, 8, 7);
  EXPECT_EQ(o.status, RouteStatus::kReturnedToSender);
  EXPECT_EQ(o.forward, path_of({R(8), R(9), H(6)}));
  EXPECT_EQ(o.back, path_of({H(6), R(9), R(8)}));
}

TEST(Routing, Errors) {
  const LabelledTree t = nine_node();
  HealingEngine eng(t, 1);
  eng.delete_and_heal(2);
  try {
    route_packet(eng.topology(), t, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSenderDead);
  }
  try {
    route_packet(eng.topology(), t, 1, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownNode);
  }
}

TEST(Routing, BothEndpointsDeadIsDiscarded) {
  const LabelledTree t = nine_node();
  HealingEngine eng(t, 1);
  eng.delete_and_heal(7);
  eng.delete_and_heal(8);
  PacketHeader h;
  h.pairs = {{7, t.label[7]}, {8, t.label[8]}};
  const RouteOutcome o = route_header(eng.topology(), t, R(9), h);
  EXPECT_EQ(o.status, RouteStatus::kDiscarded);
}

class RoutingRandom : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RoutingRandom, ShortestPathsUnderDeletions) {
  const std::uint64_t seed = GetParam();
  const std::size_t n = 10 + seed * 3 % 40;
  const LabelledTree t = preprocess(random_tree(n, seed), 0, 2 + seed % 2);
  HealingEngine eng(t, seed);
  std::mt19937_64 rng(seed);
  while (eng.topology().live_count() > 1) {
    const Topology& topo = eng.topology();
    const auto live = topo.live_nodes();
    for (NodeId s : live) {
      const auto dist = bfs(topo, R(s));
      for (NodeId w = 1; w <= t.n; ++w) {
        const RouteOutcome o = route_packet(topo, t, s, w);
        if (topo.alive(w)) {
          ASSERT_EQ(o.status, RouteStatus::kDelivered) << s << "->" << w;
          const Vertex last = o.forward.back();
          EXPECT_EQ(last.host(), w);
          EXPECT_EQ(o.logical_hops, dist.at(last)) << s << "->" << w;
          EXPECT_LE(o.logical_hops, dist.at(R(w))) << s << "->" << w;
        } else {
          ASSERT_EQ(o.status, RouteStatus::kReturnedToSender) << s << "->" << w;
          EXPECT_EQ(o.back.back().host(), s);
        }
      }
    }
    eng.delete_and_heal(live[rng() % live.size()]);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RoutingRandom, ::testing::Range<std::uint64_t>(0, 12));
