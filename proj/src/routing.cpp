#include "cft/routing.hpp"

#include <algorithm>

namespace cft {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  void need(std::size_t k) const {
    if (b_.size() - pos_ < k) {
      throw Error(ErrorCode::kTruncatedHeader,
                  "need " + std::to_string(k) + " bytes at offset " + std::to_string(pos_));
    }
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(b_[pos_] | (b_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> rest() const { return b_.subspan(pos_); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_header(const PacketHeader& header) {
  if (header.pairs.empty() || header.pairs.size() > 2) {
    throw Error(ErrorCode::kPairCountOutOfRange, std::to_string(header.pairs.size()));
  }
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(header.pairs.size()));
  for (const auto& p : header.pairs) {
    put_u32(out, p.target);
    if (p.label.size() > 0xffff) throw Error(ErrorCode::kMalformedLabel, "label too long");
    put_u16(out, static_cast<std::uint16_t>(p.label.size()));
    for (PortNumber port : p.label) put_u16(out, port);
  }
  out.insert(out.end(), header.payload.begin(), header.payload.end());
  return out;
}

PacketHeader decode_header(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint8_t count = r.u8();
  if (count < 1 || count > 2) {
    throw Error(ErrorCode::kPairCountOutOfRange, std::to_string(count));
  }
  PacketHeader h;
  for (std::uint8_t i = 0; i < count; ++i) {
    HeaderPair p;
    p.target = r.u32();
    const std::uint16_t len = r.u16();
    r.need(2 * std::size_t{len});
    for (std::uint16_t j = 0; j < len; ++j) p.label.push_back(r.u16());
    h.pairs.push_back(std::move(p));
  }
  auto rest = r.rest();
  h.payload.assign(rest.begin(), rest.end());
  return h;
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kDeliver: return "Deliver";
    case ActionKind::kForwardPort: return "ForwardPort";
    case ActionKind::kForwardParentOfHelper: return "ForwardParentOfHelper";
    case ActionKind::kForwardLeftChild: return "ForwardLeftChild";
    case ActionKind::kForwardRightChild: return "ForwardRightChild";
    case ActionKind::kNonDeliverableBounce: return "NonDeliverableBounce";
  }
  return "?";
}

const char* to_string(RouteStatus status) {
  switch (status) {
    case RouteStatus::kDelivered: return "Delivered";
    case RouteStatus::kReturnedToSender: return "ReturnedToSender";
    case RouteStatus::kDiscarded: return "Discarded";
  }
  return "?";
}

RouteAction tz_step(const TzFields& f, NodeId w, const RoutingLabel& label) {
  if (w == f.v) return {ActionKind::kDeliver, 0};
  if (w < f.d || w > f.v) return {ActionKind::kForwardPort, f.parent_port};
  if (w >= f.c) {
    if (f.ell >= label.size()) {
      throw Error(ErrorCode::kMalformedLabel, "label of " + std::to_string(w) +
                                                  " has no entry " + std::to_string(f.ell));
    }
    return {ActionKind::kForwardPort, label[f.ell]};
  }
  auto it = std::lower_bound(f.heavy.begin(), f.heavy.end(), w);
  if (it == f.heavy.end()) {
    throw Error(ErrorCode::kMalformedLabel,
                "no heavy child of " + std::to_string(f.v) + " covers " + std::to_string(w));
  }
  return {ActionKind::kForwardPort, f.heavy_ports[it - f.heavy.begin()]};
}

OptVertex next_vertex(const Topology& t, const Vertex& at, const RouteAction& a) {
  OptVertex v;
  switch (a.kind) {
    case ActionKind::kForwardPort: v = t.at_port(at, a.port); break;
    case ActionKind::kForwardParentOfHelper: v = t.at(at).parent; break;
    case ActionKind::kForwardLeftChild: v = t.at_port(at, 1); break;
    case ActionKind::kForwardRightChild: v = t.at_port(at, 2); break;
    default: return std::nullopt;
  }
  if (v && !t.contains(*v)) return std::nullopt;
  return v;
}

RouteAction ftz_step(const Topology& t, const LabelledTree& t0, const Vertex& at, NodeId w,
                     const RoutingLabel& label) {
  RouteAction a;
  if (!at.helper) {
    a = tz_step(t0.tz[at.id], w, label);
  } else {
    const IdRange& range = t.at(at).range;
    if (w == at.id) {
      a = {ActionKind::kDeliver, 0};
    } else if (!range.contains(w)) {
      a = {ActionKind::kForwardParentOfHelper, 0};
    } else if (w <= at.id) {
      a = {ActionKind::kForwardLeftChild, 0};
    } else {
      a = {ActionKind::kForwardRightChild, 0};
    }
  }
  if (a.kind != ActionKind::kDeliver && !next_vertex(t, at, a)) {
    return {ActionKind::kNonDeliverableBounce, 0};
  }
  return a;
}

bool detect_nondelivery(const Topology& t, const Vertex& at, NodeId target,
                        const RouteAction& action, const OptVertex& arrived_from) {
  if (action.kind == ActionKind::kDeliver) return false;
  if (arrived_from && !at.helper && at.id != target && t.at(at).child_count() == 0) {
    return true;
  }
  if (action.kind == ActionKind::kNonDeliverableBounce) return true;
  return arrived_from && next_vertex(t, at, action) == arrived_from;
}

PacketWalk::PacketWalk(const Vertex& start, PacketHeader header)
    : header_(std::move(header)), at_(start) {
  if (header_.pairs.empty() || header_.pairs.size() > 2) {
    throw Error(ErrorCode::kPairCountOutOfRange, std::to_string(header_.pairs.size()));
  }
  out_.forward.push_back(at_);
}

bool PacketWalk::step(const Topology& t, const LabelledTree& t0) {
  if (done_) return true;
  std::vector<Vertex>& path = returning_ ? out_.back : out_.forward;
  const HeaderPair& p = header_.pairs.front();
  const RouteAction a = ftz_step(t, t0, at_, p.target, p.label);
  if (a.kind == ActionKind::kDeliver) {
    out_.status = returning_ ? RouteStatus::kReturnedToSender : RouteStatus::kDelivered;
    done_ = true;
  } else if (detect_nondelivery(t, at_, p.target, a, from_)) {
    if (header_.pairs.size() == 1) {
      out_.status = RouteStatus::kDiscarded;
      done_ = true;
    } else {
      header_.pairs.erase(header_.pairs.begin());
      returning_ = true;
      out_.back.push_back(at_);
      from_.reset();
    }
  } else {
    from_ = at_;
    at_ = *next_vertex(t, at_, a);
    path.push_back(at_);
    ++out_.logical_hops;
    if (from_->host() != at_.host()) ++out_.physical_hops;
  }
  return done_;
}

void PacketWalk::reanchor(const Topology& t) {
  if (t.contains(at_)) {
    if (from_ && !t.contains(*from_)) from_.reset();
    return;
  }
  at_ = Vertex::real(at_.host());
  from_.reset();
  (returning_ ? out_.back : out_.forward).push_back(at_);
}

RouteOutcome PacketWalk::outcome() const { return out_; }

RouteOutcome route_header(const Topology& t, const LabelledTree& t0, const Vertex& start,
                          PacketHeader header) {
  if (!t.contains(start)) {
    throw Error(ErrorCode::kPreconditionViolated, "injection vertex " + to_string(start));
  }
  PacketWalk walk(start, std::move(header));
  // Each vertex is entered at most once per direction on a tree.
  const std::size_t limit = 2 * t.vertices().size() + 4;
  for (std::size_t steps = 0; !walk.step(t, t0); ++steps) {
    if (steps > limit) throw Error(ErrorCode::kInternal, "routing did not terminate");
  }
  return walk.outcome();
}

RouteOutcome route_packet(const Topology& t, const LabelledTree& t0, NodeId s, NodeId dst) {
  if (!t.alive(s)) throw Error(ErrorCode::kSenderDead, std::to_string(s));
  if (dst < 1 || dst > t0.n) throw Error(ErrorCode::kUnknownNode, std::to_string(dst));
  PacketHeader h;
  h.pairs.push_back({dst, t0.label[dst]});
  h.pairs.push_back({s, t0.label[s]});
  return route_header(t, t0, Vertex::real(s), std::move(h));
}

}  // namespace cft
