#include <algorithm>
#include <random>
#include <sstream>

#include "cft/harness.hpp"

namespace cft {

namespace {

constexpr std::size_t kAllPairsCap = 60;
constexpr std::size_t kSampledPairs = 500;
constexpr std::size_t kMaxRounds = 5;
constexpr std::size_t kMaxMessageRefs = 8;
constexpr std::size_t kInterleavedSteps = 2;

NodeId map_index(const LabelledTree& t0, std::size_t idx, const char* what) {
  if (idx < 1 || idx > t0.n) {
    throw Error(ErrorCode::kConfigInvalid,
                std::string(what) + " names unknown node " + std::to_string(idx));
  }
  return t0.id_of[idx - 1];
}

class Runner {
 public:
  Runner(const ScenarioConfig& c, const RunHooks& hooks)
      : c_(c), hooks_(hooks), t0_(build_tree(c)), oracle_(t0_), engine_(t0_, c.seed) {}

  Metrics run();

 private:
  void report(CheckResult r);
  void run_checks();
  std::vector<std::pair<NodeId, NodeId>> probe_pairs();
  void probe_phased();
  void inject_interleaved();
  void advance_interleaved(bool drain);
  void record_probe(NodeId s, NodeId w, const RouteOutcome& o, bool checked);
  bool stopped() const { return c_.stop_on_violation && !m_.violations.empty(); }

  const ScenarioConfig& c_;
  const RunHooks& hooks_;
  LabelledTree t0_;
  Oracle oracle_;
  HealingEngine engine_;
  Metrics m_;
  std::size_t t_ = 0;
  bool have_slack_ = false;
  struct Flight {
    NodeId s;
    NodeId w;
    PacketWalk walk;
  };
  std::vector<Flight> flights_;
};

void Runner::report(CheckResult r) {
  const auto i = static_cast<std::size_t>(r.id);
  ++m_.checks_run[i];
  if (r.passed) return;
  ++m_.check_failures[i];
  m_.violations.push_back({t_, r.id, r.counterexample});
}

void Runner::run_checks() {
  const Topology& t = engine_.topology();
  report(oracle_.tree_shape(t));
  report(oracle_.bst(t));
  std::size_t inc = 0;
  NodeId who = kNoNode;
  report(oracle_.degree(t, &inc, &who));
  if (inc > m_.max_degree_increase) {
    m_.max_degree_increase = inc;
    m_.degree_witness_t = t_;
    m_.degree_witness_node = who;
  }
  std::size_t diam = 0;
  report(oracle_.diameter(t, &diam));
  m_.max_diameter = std::max(m_.max_diameter, diam);
  if (!m_.rows.empty()) m_.rows.back().diameter = diam;
  report(oracle_.memory(t, engine_.states()));
  report(oracle_.helpers(t, engine_.states()));
}

std::vector<std::pair<NodeId, NodeId>> Runner::probe_pairs() {
  const Topology& t = engine_.topology();
  const auto live = t.live_nodes();
  std::vector<std::pair<NodeId, NodeId>> out;
  std::mt19937_64 rng(c_.probes.seed * 1000003 + t_);
  switch (c_.probes.kind) {
    case ProbeKind::kNone:
      break;
    case ProbeKind::kAllPairs:
      if (t0_.n <= kAllPairsCap) {
        for (NodeId s : live) {
          for (NodeId w : live) {
            if (s != w) out.emplace_back(s, w);
          }
        }
      } else if (live.size() > 1) {
        for (std::size_t i = 0; i < kSampledPairs; ++i) {
          NodeId s = live[rng() % live.size()];
          NodeId w = live[rng() % live.size()];
          if (s != w) out.emplace_back(s, w);
        }
      }
      break;
    case ProbeKind::kSampled:
      // Targets range over all ids, so dead targets exercise non-delivery.
      for (std::size_t i = 0; i < c_.probes.count && t0_.n > 1; ++i) {
        NodeId s = live[rng() % live.size()];
        NodeId w = static_cast<NodeId>(1 + rng() % t0_.n);
        if (s != w) out.emplace_back(s, w);
      }
      break;
    case ProbeKind::kExplicit:
      for (const auto& [si, wi] : c_.probes.pairs) {
        NodeId s = map_index(t0_, si, "probes");
        NodeId w = map_index(t0_, wi, "probes");
        if (s != w && t.alive(s)) out.emplace_back(s, w);
      }
      break;
  }
  return out;
}

void Runner::record_probe(NodeId s, NodeId w, const RouteOutcome& o, bool checked) {
  const Topology& t = engine_.topology();
  ProbeRecord p;
  p.t = t_;
  p.s = s;
  p.w = w;
  p.status = o.status;
  p.logical = o.logical_hops;
  p.physical = o.physical_hops;
  p.forward = o.forward_hops();
  p.back = o.back_hops();
  p.delta = oracle_.dist_t0(s, w);
  p.y = engine_.nonleaf_deletions();
  p.bound = oracle_.path_bound(s, w, p.y);
  p.g0_dist = oracle_.dist_g0(s, w);
  ++m_.probes;
  switch (o.status) {
    case RouteStatus::kDelivered: ++m_.delivered; break;
    case RouteStatus::kReturnedToSender: ++m_.returned; break;
    case RouteStatus::kDiscarded: ++m_.discarded; break;
  }
  if (o.status == RouteStatus::kDelivered && p.g0_dist > 0) {
    m_.max_stretch_g0 =
        std::max(m_.max_stretch_g0, static_cast<double>(p.physical) / p.g0_dist);
  }
  if (checked) {
    CheckResult r{CheckId::kRouting, true, 0, {}};
    r.checked = 1;
    std::ostringstream why;
    const bool live = t.alive(w);
    if (live && o.status != RouteStatus::kDelivered) {
      why << "probe " << s << "->" << w << " not delivered: " << to_string(o.status);
    } else if (!live && o.status != RouteStatus::kReturnedToSender) {
      why << "probe " << s << "->" << w << " to dead target ended " << to_string(o.status);
    } else if (live) {
      const Vertex last = o.forward.back();
      p.tree_dist = tree_path(t, Vertex::real(s), last).size() - 1;
      const long long slack = static_cast<long long>(p.bound) - static_cast<long long>(p.logical);
      if (!have_slack_ || slack < m_.worst_slack) m_.worst_slack = slack;
      have_slack_ = true;
      if (last.host() != w) {
        why << "probe " << s << "->" << w << " delivered at " << to_string(last);
      } else if (p.logical > p.bound) {
        ++m_.path_bound_violations;
        why << "probe " << s << "->" << w << " took " << p.logical << " hops, bound "
            << p.bound << " (delta " << p.delta << ", y " << p.y << ")";
      } else if (t0_.n <= kAllPairsCap &&
                 tree_path(t, Vertex::real(s), last) != o.forward) {
        ++m_.stretch_violations;
        why << "probe " << s << "->" << w << " left the unique tree path";
      }
    } else if (p.forward > p.bound || p.back > p.bound) {
      why << "probe " << s << "->" << w << " return " << p.back << " / forward "
          << p.forward << " exceeds bound " << p.bound;
    }
    if (!why.str().empty()) {
      r.passed = false;
      r.counterexample = why.str();
    }
    report(r);
  }
  m_.probe_log.push_back(p);
}

void Runner::probe_phased() {
  for (const auto& [s, w] : probe_pairs()) {
    record_probe(s, w, route_packet(engine_.topology(), t0_, s, w), true);
    if (stopped()) return;
  }
}

void Runner::inject_interleaved() {
  for (const auto& [s, w] : probe_pairs()) {
    PacketHeader h;
    h.pairs.push_back({w, t0_.label[w]});
    h.pairs.push_back({s, t0_.label[s]});
    flights_.push_back({s, w, PacketWalk(Vertex::real(s), std::move(h))});
  }
}

void Runner::advance_interleaved(bool drain) {
  const Topology& t = engine_.topology();
  const std::size_t limit = 4 * t.vertices().size() + 8;
  // A packet whose buffering host was deleted by an explicit sequence is lost.
  std::erase_if(flights_, [&](const Flight& f) {
    if (t.alive(f.walk.host())) return false;
    ++m_.probes;
    ++m_.discarded;
    return true;
  });
  for (auto& f : flights_) {
    f.walk.reanchor(t);
    for (std::size_t k = 0; !f.walk.done() && (drain ? k < limit : k < kInterleavedSteps); ++k) {
      f.walk.step(t, t0_);
    }
    if (drain && !f.walk.done()) {
      m_.violations.push_back({t_, CheckId::kRouting, "packet did not terminate"});
      ++m_.check_failures[static_cast<std::size_t>(CheckId::kRouting)];
    }
  }
  auto done = std::stable_partition(flights_.begin(), flights_.end(),
                                    [](const Flight& f) { return !f.walk.done(); });
  for (auto it = done; it != flights_.end(); ++it) {
    record_probe(it->s, it->w, it->walk.outcome(), false);
  }
  flights_.erase(done, flights_.end());
}

Metrics Runner::run() {
  m_.n = t0_.n;
  m_.b = t0_.b;
  m_.root = t0_.root;
  m_.diameter_t0 = oracle_.diameter_t0();
  m_.delta_t0 = oracle_.max_degree_t0();
  m_.id_of = t0_.id_of;
  for (NodeId v = 1; v <= t0_.n; ++v) {
    m_.max_heavy_children = std::max(m_.max_heavy_children, t0_.tz[v].heavy.size());
  }

  AdversaryConfig ac;
  ac.kind = c_.adversary;
  ac.seed = c_.adversary_seed;
  for (std::size_t idx : c_.sequence) ac.sequence.push_back(map_index(t0_, idx, "sequence"));
  Adversary adversary(ac);
  const bool interleaved = c_.mode == RunMode::kInterleaved;
  const std::size_t every = std::max<std::size_t>(c_.probe_every, 1);
  const std::size_t budget = c_.deletions.value_or(t0_.n);

  run_checks();
  if (hooks_.on_checkpoint) hooks_.on_checkpoint(0, engine_.topology());
  if (interleaved) {
    inject_interleaved();
  } else if (!stopped()) {
    probe_phased();
  }

  for (t_ = 1; t_ <= budget && !stopped(); ++t_) {
    std::set<NodeId> busy;
    for (const auto& f : flights_) busy.insert(f.walk.host());
    while (interleaved && !flights_.empty() && busy.size() >= engine_.topology().live_count()) {
      advance_interleaved(false);
      busy.clear();
      for (const auto& f : flights_) busy.insert(f.walk.host());
    }
    NodeId x;
    try {
      x = adversary.next(engine_.topology(), busy);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kExhausted) break;
      if (e.code() == ErrorCode::kPreconditionViolated) {
        throw Error(ErrorCode::kConfigInvalid, std::string("adversary: ") + e.what());
      }
      throw;
    }
    HealingPhase phase = engine_.delete_and_heal(x);
    if (hooks_.on_phase) hooks_.on_phase(t_, x, phase);
    m_.y = engine_.nonleaf_deletions();

    DeletionRow row;
    row.t = t_;
    row.deleted = x;
    row.is_leaf = phase.was_leaf;
    row.rounds = phase.rounds;
    row.max_msgs = phase.max_sent;
    row.max_refs = phase.max_stored_refs;
    row.max_msg_refs = phase.max_msg_refs;
    row.over_budget = phase.over_budget.size();
    std::size_t inc = 0;
    oracle_.degree(engine_.topology(), &inc);
    row.deg_increase = inc;
    m_.rows.push_back(row);
    m_.max_rounds = std::max(m_.max_rounds, phase.rounds);
    m_.max_msgs = std::max(m_.max_msgs, phase.max_sent);
    m_.max_msg_refs = std::max(m_.max_msg_refs, phase.max_msg_refs);
    m_.max_refs = std::max(m_.max_refs, phase.max_stored_refs);
    if (phase.rounds > kMaxRounds || phase.max_msg_refs > kMaxMessageRefs) {
      ++m_.round_violations;
    }
    if (!phase.over_budget.empty()) ++m_.budget_violations;

    const bool last = t_ == budget || engine_.topology().live_count() < 2;
    const bool checkpoint = t_ % every == 0 || last;
    if (c_.checks == CheckMode::kFull || checkpoint) {
      run_checks();
    } else {
      m_.rows.back().diameter = physical_diameter(engine_.topology());
      m_.max_diameter = std::max(m_.max_diameter, m_.rows.back().diameter);
    }
    if (checkpoint && hooks_.on_checkpoint) hooks_.on_checkpoint(t_, engine_.topology());
    if (interleaved) {
      advance_interleaved(false);
      if (checkpoint) inject_interleaved();
    } else if (checkpoint && !stopped()) {
      probe_phased();
    }
  }
  if (interleaved) advance_interleaved(true);
  return std::move(m_);
}

}  // namespace

Metrics run_scenario(const ScenarioConfig& config, const RunHooks& hooks) {
  Runner r(config, hooks);
  return r.run();
}

}  // namespace cft
