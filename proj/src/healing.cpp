#include "cft/healing.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace cft {

const char* to_string(MsgKind kind) {
  switch (kind) {
    case MsgKind::kConnect: return "Connect";
    case MsgKind::kAck: return "Ack";
    case MsgKind::kBrLeafLost: return "BrLeafLost";
    case MsgKind::kBrNodeReplace: return "BrNodeReplace";
    case MsgKind::kPtWillConnection: return "PtWillConnection";
    case MsgKind::kPtNewLeafWill: return "PtNewLeafWill";
    case MsgKind::kPtBackup: return "PtBackup";
  }
  return "?";
}

std::set<std::pair<Vertex, Vertex>> physical_edges(const Topology& t) {
  std::set<std::pair<Vertex, Vertex>> out;
  for (const auto& [v, tv] : t.vertices()) {
    if (tv.parent && tv.parent->host() != v.host()) out.insert({*tv.parent, v});
  }
  return out;
}

HealingEngine::HealingEngine(const LabelledTree& t0, std::uint64_t seed)
    : t0_(&t0), topo_(t0), wills_(initial_wills(t0)), seed_(seed) {
  states_ = derive_states(t0, topo_, wills_);
}

HealingPhase HealingEngine::delete_and_heal(NodeId x) {
  auto before = physical_edges(topo_);
  DeletionNotice notice = topo_.delete_node(x);
  topo_.begin_healing();
  HealingPhase phase;
  phase.trigger = x;
  phase.was_leaf = notice.was_leaf;
  phase.notified = notice.notified();
  if (notice.was_leaf) {
    fix_leaf(notice);
  } else {
    fix_nonleaf(notice);
    ++nonleaf_deletions_;
  }
  phase.will_events = sync_wills();
  std::vector<NodeState> desired = derive_states(*t0_, topo_, wills_);
  plan_messages(phase, notice, desired, before);

  // Patches touch disjoint per-node state, so any delivery order must agree.
  std::vector<NodeId> order;
  for (NodeId v = 1; v < desired.size(); ++v) {
    if (!(states_[v] == desired[v])) order.push_back(v);
  }
  std::mt19937_64 rng(seed_ + 0x9e3779b97f4a7c15ULL * ++phase_counter_);
  std::shuffle(order.begin(), order.end(), rng);
  for (NodeId v : order) states_[v] = std::move(desired[v]);
  topo_.end_healing();
  return phase;
}

void HealingEngine::fix_nonleaf(const DeletionNotice& notice) {
  const NodeId x = notice.x;
  const Ghost& gx = notice.ghosts.front();
  const Ghost* ghx = notice.ghosts.size() > 1 ? &notice.ghosts[1] : nullptr;
  const RtBlueprint& will = wills_.at(x);
  const auto reps = will.leaves_in_order();

  std::vector<Willportion> parts;
  for (NodeId r : reps) {
    const auto& wp = states_[r].portion;
    if (!wp || wp->owner != x) {
      throw Error(ErrorCode::kInternal, "child " + std::to_string(r) + " lacks its portion");
    }
    parts.push_back(*wp);
  }
  if (!(reconstruct_will(parts) == will)) {
    throw Error(ErrorCode::kInternal, "portions do not rebuild Will(" + std::to_string(x) + ")");
  }
  const auto& backup = states_[will.heir()].backup;
  if (!backup || backup->of != x || backup->has_helper != (ghx != nullptr)) {
    throw Error(ErrorCode::kInternal, "heir backup missing for " + std::to_string(x));
  }

  std::map<Vertex, Vertex> realize;
  for (NodeId r : reps) {
    const PortNumber port = will.at(Vertex::real(r)).port;
    OptVertex slot;
    if (port >= 1 && port <= gx.links.child.size()) slot = gx.links.child[port - 1];
    if (!slot || slot->host() != r) {
      throw Error(ErrorCode::kInternal, "slot <" + std::to_string(port) + "> of " +
                                            std::to_string(x) + " not held by " +
                                            std::to_string(r));
    }
    const Vertex hr = Vertex::helper_of(r);
    if (*slot == hr) {
      // Two occurrences of r: its helper is reused inside, its child moves up.
      auto kids = topo_.children(hr);
      if (kids.size() != 1) {
        throw Error(ErrorCode::kInternal, "slot helper " + to_string(hr) + " is not unary");
      }
      realize[Vertex::real(r)] = kids.front();
      topo_.set_range(hr, will.at(hr).range);
    } else {
      realize[Vertex::real(r)] = Vertex::real(r);
      topo_.add_helper(r, will.at(hr).range);
    }
    realize[hr] = hr;
  }
  for (const auto& [wv, tv] : realize) topo_.detach(tv);
  for (const auto& [wv, node] : will.nodes()) {
    for (int s = 0; s < 2; ++s) {
      if (node.child[s]) {
        topo_.place(realize.at(*node.child[s]),
                    {realize.at(wv), static_cast<PortNumber>(s + 1)});
      }
    }
  }
  const Vertex root = realize.at(*will.root());
  if (ghx) {
    const Vertex left = realize.at(*will.at(*will.root()).child[0]);
    topo_.detach(left);
    topo_.set_range(root, ghx->links.range);
    topo_.place(root, ghx->position);
    for (int s = 0; s < 2; ++s) {
      const OptVertex& c = ghx->links.child[s];
      if (!c) continue;
      topo_.place(*c == Vertex::real(x) ? left : *c,
                  {root, static_cast<PortNumber>(s + 1)});
    }
    if (gx.position.parent != Vertex::helper_of(x)) {
      if (!gx.position.parent) {
        throw Error(ErrorCode::kInternal, "root real node hosted a helper");
      }
      topo_.place(left, gx.position);
    }
  } else {
    topo_.place(root, gx.position);
  }
  wills_.erase(x);
}

void HealingEngine::fix_leaf(const DeletionNotice& notice) {
  const NodeId x = notice.x;
  const Vertex rx = Vertex::real(x);
  const Vertex hx = Vertex::helper_of(x);
  const Ghost& gx = notice.ghosts.front();
  const Ghost* ghx = notice.ghosts.size() > 1 ? &notice.ghosts[1] : nullptr;
  const OptVertex parent = gx.links.parent;
  if (!parent) throw Error(ErrorCode::kInternal, "leaf root with live nodes left");

  if (!parent->helper) {
    if (ghx) throw Error(ErrorCode::kInternal, "leaf under real parent hosted a helper");
    return;
  }
  if (*parent == hx) {
    for (const auto& c : ghx->links.child) {
      if (c && *c != rx) topo_.place(*c, ghx->position);
    }
    return;
  }

  const Vertex q = *parent;
  auto kids = topo_.children(q);
  if (kids.size() != 1) throw Error(ErrorCode::kInternal, "bypassed helper not unary");
  const Vertex lower = kids.front();
  const Position qpos = topo_.position_of(q);
  bool q_under_hx = false;
  if (ghx) {
    for (const auto& c : ghx->links.child) q_under_hx = q_under_hx || c == q;
  }
  topo_.remove_vertex(q);
  if (ghx) {
    const NodeId t = q.host();
    const Vertex succ = Vertex::helper_of(t);
    topo_.add_helper(t, ghx->links.range);
    topo_.place(succ, ghx->position);
    for (int s = 0; s < 2; ++s) {
      const OptVertex& c = ghx->links.child[s];
      if (!c) continue;
      topo_.place(*c == q ? lower : *c, {succ, static_cast<PortNumber>(s + 1)});
    }
  }
  if (!q_under_hx) topo_.place(lower, qpos);
}

std::vector<WillEvent> HealingEngine::sync_wills() {
  std::vector<WillEvent> events;
  for (auto it = wills_.begin(); it != wills_.end();) {
    const NodeId p = it->first;
    RtBlueprint& will = it->second;
    for (NodeId r : will.leaves_in_order()) {
      const PortNumber port = will.at(Vertex::real(r)).port;
      const OptVertex v = topo_.at_port(Vertex::real(p), port);
      if (!v) {
        WillEvent e;
        e.owner = p;
        e.removal = true;
        e.old_rep = r;
        e.removed = will.remove_leaf(r);
        events.push_back(e);
      } else if (v->host() != r) {
        will.rename(r, v->host());
        events.push_back({p, false, r, v->host(), {}});
      }
    }
    if (will.empty()) {
      it = wills_.erase(it);
    } else {
      ++it;
    }
  }
  return events;
}

namespace {

struct HeldEntry {
  NodeId holder = kNoNode;
  const LeafWill* will = nullptr;
};

std::map<std::pair<WillLevel, NodeId>, HeldEntry> held_index(
    const std::vector<NodeState>& st) {
  std::map<std::pair<WillLevel, NodeId>, HeldEntry> out;
  for (NodeId v = 1; v < st.size(); ++v) {
    for (const auto& w : st[v].held) out[{w.level, w.owner}] = {v, &w};
  }
  return out;
}

}  // namespace

void HealingEngine::plan_messages(HealingPhase& phase, const DeletionNotice& notice,
                                  const std::vector<NodeState>& desired,
                                  const std::set<std::pair<Vertex, Vertex>>& edges_before) {
  const std::size_t n = topo_.n();
  std::vector<std::size_t> know(n + 1, 0);
  for (NodeId v : phase.notified) know[v] = 1;
  std::vector<HealMessage> msgs;
  auto send = [&](std::size_t round, NodeId from, NodeId to, MsgKind kind,
                  std::size_t refs) {
    if (from == to || !topo_.alive(from) || !topo_.alive(to)) return;
    msgs.push_back({round, from, to, kind, refs});
    know[to] = std::max(know[to], round);
  };
  auto unexplained = [&](NodeId v, const char* what) {
    return Error(ErrorCode::kInternal, std::string(what) + " at node " +
                                           std::to_string(v) + " after deleting " +
                                           std::to_string(notice.x));
  };
  const auto old_held = held_index(states_);
  const auto new_held = held_index(desired);

  // Executor of a leaf deletion under a helper: the tree-level LeafHeir.
  NodeId executor = kNoNode;
  if (auto it = old_held.find({WillLevel::kTree, notice.x}); it != old_held.end()) {
    executor = it->second.holder;
  }

  // New physical links.
  for (const auto& e : physical_edges(topo_)) {
    if (edges_before.count(e)) continue;
    const NodeId hp = e.first.host();
    const NodeId hc = e.second.host();
    if (phase.notified.count(hc)) {
      send(2, hc, hp, MsgKind::kConnect, 2);
      send(3, hp, hc, MsgKind::kAck, 1);
    } else if (phase.notified.count(hp)) {
      send(2, hp, hc, MsgKind::kConnect, 2);
      send(3, hc, hp, MsgKind::kAck, 1);
    } else if (executor != kNoNode) {
      send(2, executor, hp, MsgKind::kConnect, 2);
      send(2, executor, hc, MsgKind::kConnect, 2);
      send(3, hp, executor, MsgKind::kAck, 1);
      send(3, hc, executor, MsgKind::kAck, 1);
    } else {
      throw unexplained(hc, ("new link " + to_string(e.first) + "-" + to_string(e.second) + (notice.was_leaf ? " leaf" : " nonleaf") + " without informed endpoint").c_str());
    }
  }

  // Will maintenance at the owners. Every rep and every will-level LeafHeir of
  // Will(p) is a physical neighbour of p, so one broadcast patches them all.
  std::set<NodeId> patched;
  // Round by which a node holds the complete patch of a will it belongs to.
  std::map<NodeId, std::size_t> patch_known;
  for (const auto& ev : phase.will_events) {
    const NodeId p = ev.owner;
    if (know[p] == 0) throw unexplained(p, "will change unknown to owner");
    patched.insert(p);
    const std::size_t r = know[p] + 1;
    const auto nbrs = topo_.neighbour_hosts(p);
    if (!ev.removal) {
      for (NodeId nb : nbrs) send(r, p, nb, MsgKind::kBrNodeReplace, 2);
      continue;
    }
    std::size_t bcast = r;
    auto it = old_held.find({WillLevel::kWill, ev.old_rep});
    if (it != old_held.end()) {
      const NodeId heir = it->second.holder;
      const LeafWill& lw = *it->second.will;
      const std::size_t reply = lw.refs() + (lw.upper || lw.lower ? 0 : 2);
      send(r, p, heir, MsgKind::kBrLeafLost, 1);
      send(r + 1, heir, p, MsgKind::kPtWillConnection, reply);
      patch_known[heir] = r;
      bcast = r + 2;
    } else if (ev.removed.lower) {
      throw unexplained(p, "will leaf lost without LeafHeir");
    }
    auto count = [](const OptVertex& v) -> std::size_t { return v ? 1 : 0; };
    std::size_t refs = 2 + count(ev.removed.upper) + count(ev.removed.lower);
    auto w = wills_.find(p);
    if (ev.removed.successor && w != wills_.end()) {
      const RtNode& sn = w->second.at(*ev.removed.successor);
      refs += count(sn.parent) + count(sn.child[0]) + count(sn.child[1]);
    }
    for (NodeId nb : nbrs) send(bcast, p, nb, MsgKind::kBrLeafLost, refs);
  }

  // Refreshes depend on what each sender knew after the primary exchange.
  const std::vector<std::size_t> settled = know;

  for (const auto& [c, will] : wills_) {
    const NodeId h = will.heir();
    if (states_[h].backup == desired[h].backup) continue;
    if (settled[c] == 0) throw unexplained(c, "backup change unknown to owner");
    std::size_t refs = desired[h].backup->refs();
    for (; refs > 0; refs -= std::min<std::size_t>(refs, 8)) {
      send(settled[c] + 1, c, h, MsgKind::kPtBackup, std::min<std::size_t>(refs, 8));
    }
  }

  std::set<std::pair<WillLevel, NodeId>> keys;
  for (const auto& [k, e] : old_held) keys.insert(k);
  for (const auto& [k, e] : new_held) keys.insert(k);
  for (const auto& key : keys) {
    auto o = old_held.find(key);
    auto nw = new_held.find(key);
    const HeldEntry* oe = o == old_held.end() ? nullptr : &o->second;
    const HeldEntry* ne = nw == new_held.end() ? nullptr : &nw->second;
    if (oe && ne && oe->holder == ne->holder) {
      if (*oe->will == *ne->will) continue;
      // The holder heard the owner's patch broadcast and applies it itself.
      if (key.first == WillLevel::kWill && patched.count(ne->will->will_owner)) continue;
    }
    const NodeId w = key.second;
    if (!topo_.alive(w)) continue;
    if (settled[w] == 0) throw unexplained(w, "LeafWill change unknown to owner");
    std::size_t r = settled[w] + 1;
    if (auto pk = patch_known.find(w); pk != patch_known.end()) r = pk->second + 1;
    const NodeId relay = (ne ? ne->will : oe->will)->will_owner;
    const auto w_nbrs = topo_.neighbour_hosts(w);
    auto route = [&](NodeId to, std::size_t refs) {
      if (key.first == WillLevel::kTree || relay == kNoNode || w_nbrs.count(to)) {
        send(r, w, to, MsgKind::kPtNewLeafWill, refs);
      } else {
        send(r, w, relay, MsgKind::kPtNewLeafWill, refs);
        send(r + 1, relay, to, MsgKind::kPtNewLeafWill, refs);
      }
    };
    if (ne) route(ne->holder, std::min<std::size_t>(8, ne->will->refs() + 1));
    if (oe && (!ne || oe->holder != ne->holder) && topo_.alive(oe->holder)) {
      route(oe->holder, 2);
    }
  }

  for (NodeId v : topo_.live_nodes()) {
    if (!(states_[v] == desired[v]) && know[v] == 0) {
      throw unexplained(v, "state change without message");
    }
  }

  std::sort(msgs.begin(), msgs.end());
  std::map<NodeId, std::size_t> sent;
  phase.rounds = 1;
  for (const auto& m : msgs) {
    phase.rounds = std::max(phase.rounds, m.round);
    phase.max_msg_refs = std::max(phase.max_msg_refs, m.refs);
    phase.max_sent = std::max(phase.max_sent, ++sent[m.from]);
  }
  for (const auto& [v, k] : sent) {
    const std::size_t deg = topo_.degree(v);
    if (k > deg + 4) phase.over_budget.push_back({v, k, deg});
  }
  for (NodeId v : topo_.live_nodes()) {
    phase.max_stored_refs = std::max(phase.max_stored_refs, desired[v].refs());
  }
  phase.messages = std::move(msgs);
}

}  // namespace cft
