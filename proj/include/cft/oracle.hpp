#pragma once

#include <string>
#include <vector>

#include "cft/healing.hpp"
#include "cft/routing.hpp"

namespace cft {

enum class CheckId : std::uint8_t {
  kTreeShape = 1,
  kBst = 2,
  kDegree = 3,
  kDiameter = 4,
  kMemory = 5,
  kHelpers = 6,
  kRouting = 7,
};

const char* to_string(CheckId id);

struct CheckResult {
  CheckId id = CheckId::kTreeShape;
  bool passed = true;
  std::size_t checked = 0;
  std::string counterexample;
};

/// Brute-force checks over a quiescent snapshot. Distances in T0 come from
/// BFS over the stored parent/children arrays, never from routing state.
class Oracle {
 public:
  explicit Oracle(const LabelledTree& t0);

  const LabelledTree& t0() const { return *t0_; }
  /// Hop distance in T0.
  std::size_t dist_t0(NodeId u, NodeId w) const { return dist_[u][w]; }
  /// Hop distance in G0, or SIZE_MAX if disconnected.
  std::size_t dist_g0(NodeId u, NodeId w) const { return gdist_[u][w]; }
  std::size_t diameter_t0() const { return diameter_; }
  std::size_t max_degree_t0() const { return max_degree_; }
  std::size_t log_delta() const;
  std::size_t path_bound(NodeId u, NodeId w, std::size_t y) const;
  std::size_t diameter_bound() const;

  CheckResult tree_shape(const Topology& t) const;
  CheckResult bst(const Topology& t) const;
  CheckResult degree(const Topology& t, std::size_t* max_increase = nullptr,
                     NodeId* witness = nullptr) const;
  CheckResult diameter(const Topology& t, std::size_t* diameter = nullptr) const;
  CheckResult memory(const Topology& t, const std::vector<NodeState>& states,
                     std::size_t* max_refs = nullptr) const;
  CheckResult helpers(const Topology& t, const std::vector<NodeState>& states) const;

 private:
  const LabelledTree* t0_;
  std::vector<std::vector<std::size_t>> dist_;
  std::vector<std::vector<std::size_t>> gdist_;
  std::size_t diameter_ = 0;
  std::size_t max_degree_ = 0;
};

/// Diameter of the host graph of T_t (links between distinct live hosts).
std::size_t physical_diameter(const Topology& t);

/// Unique path between two vertices of T_t.
std::vector<Vertex> tree_path(const Topology& t, const Vertex& a, const Vertex& b);

}  // namespace cft
