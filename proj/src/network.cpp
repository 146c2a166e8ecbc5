#include "gnoc/network.hpp"

#include <string>

namespace gnoc {

Network::Network(const MeshConfig& cfg, SimOptions opts)
    : cfg_(cfg),
      opts_(opts),
      arrivals_(static_cast<size_t>(cfg.node_count())),
      credits_(static_cast<size_t>(cfg.node_count())) {
  cfg_.validate();
  routers_.reserve(static_cast<size_t>(cfg_.node_count()));
  for (int i = 0; i < cfg_.node_count(); ++i) {
    const std::uint64_t seed = opts_.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i);
    routers_.emplace_back(cfg_, cfg_.node(i), seed, opts_.stall_prob);
  }
}

void Network::set_event_sink(EventSink sink) {
  events_ = std::move(sink);
  for (Router& r : routers_) r.set_event_sink(events_ ? &events_ : nullptr);
}

void Network::advance_to(std::int64_t cycle) {
  if (cycle <= now_) return;
  if (!idle()) throw std::logic_error("cannot skip cycles while traffic is in flight");
  now_ = cycle;
  last_progress_ = cycle;
}

void Network::inject(NodeId at, std::vector<Flit> packet) {
  router(at).enqueue_injection(std::move(packet));
}

std::uint64_t Network::send_unicast(NodeId src, const Payload& p, int vc) {
  Router& r = router(src);
  PacketSpec spec;
  spec.type = PacketType::Unicast;
  spec.src = src;
  spec.dst = p.dst;
  spec.to_buffer = true;
  spec.packet_id = r.next_packet_id();
  spec.vc = vc;
  const Payload one[] = {p};
  r.enqueue_injection(build_packet(spec, one, cfg_));
  return spec.packet_id;
}

void Network::post_payload(NodeId at, const Payload& p, int delta) {
  router(at).gather_unit().post(p, delta);
  if (events_) events_(now_, at, "post");
}

bool Network::idle() const {
  if (in_flight_links_ != 0 || !open_.empty()) return false;
  for (const Router& r : routers_) {
    if (!r.empty()) return false;
  }
  return true;
}

void Network::deliver(NodeId at, Port sink, Flit flit) {
  ++flits_ejected_;
  const auto key = std::make_tuple(cfg_.index(at), static_cast<int>(sink), flit.vc);
  const std::int64_t when = now_ + 1;
  auto it = open_.find(key);
  if (flit.is_head()) {
    if (it != open_.end()) {
      throw ProtocolError("wormhole interleaving at sink " + to_string(at) + ": packet " +
                          std::to_string(flit.packet_id) + " overlaps " +
                          std::to_string(it->second.id));
    }
    DeliveredPacket pkt;
    pkt.id = flit.packet_id;
    pkt.type = flit.packet_type;
    pkt.src = flit.src;
    pkt.dst = flit.dst;
    pkt.vc = flit.vc;
    pkt.hops = flit.hops;
    pkt.aspace = flit.aspace;
    pkt.inject_cycle = flit.inject_cycle;
    pkt.dst_arrival = flit.dst_arrival;
    pkt.head_cycle = when;
    pkt.flits = 1;
    it = open_.emplace(key, std::move(pkt)).first;
  } else {
    if (it == open_.end() || it->second.id != flit.packet_id) {
      throw ProtocolError("out-of-order flit of packet " + std::to_string(flit.packet_id) +
                          " at sink " + to_string(at));
    }
    ++it->second.flits;
    for (Payload& p : flit.payloads) it->second.payloads.push_back(p);
  }
  if (flit.is_tail()) {
    it->second.tail_cycle = when;
    if (events_) events_(when, at, "deliver");
    delivered_.push_back(std::move(it->second));
    open_.erase(it);
  }
}

void Network::step() {
  std::vector<std::vector<IncomingFlit>> next_arrivals(routers_.size());
  std::vector<std::vector<CreditReturn>> next_credits(routers_.size());
  bool progressed = false;
  in_flight_links_ = 0;

  for (size_t i = 0; i < routers_.size(); ++i) {
    Router& r = routers_[i];
    if (arrivals_[i].empty() && credits_[i].empty() && r.empty()) continue;
    RouterOutput out = r.cycle(now_, arrivals_[i], credits_[i]);
    progressed |= out.progressed;
    for (SentFlit& s : out.flits) {
      if (auto n = neighbor(cfg_, r.id(), s.out)) {
        next_arrivals[static_cast<size_t>(cfg_.index(*n))].push_back(
            IncomingFlit{opposite(s.out), std::move(s.flit)});
        ++in_flight_links_;
      } else {
        deliver(r.id(), s.out, std::move(s.flit));
      }
    }
    for (const CreditReturn& c : out.credits) {
      // The input port's upstream neighbor owns the matching output.
      auto up = neighbor(cfg_, r.id(), c.port);
      if (!up) throw std::logic_error("credit for an unconnected input port");
      next_credits[static_cast<size_t>(cfg_.index(*up))].push_back(
          CreditReturn{opposite(c.port), c.vc});
      ++in_flight_links_;
    }
  }
  arrivals_ = std::move(next_arrivals);
  credits_ = std::move(next_credits);
  ++now_;

  if (progressed) {
    last_progress_ = now_;
  } else if (!idle() && now_ - last_progress_ > opts_.watchdog_cycles) {
    throw DeadlockError("no flit moved for " + std::to_string(opts_.watchdog_cycles) +
                        " cycles at cycle " + std::to_string(now_));
  }
}

std::vector<DeliveredPacket> Network::take_delivered() {
  std::vector<DeliveredPacket> out;
  out.swap(delivered_);
  return out;
}

ActivityCounters Network::activity() const {
  ActivityCounters total;
  for (const Router& r : routers_) total += r.activity();
  return total;
}

GatherCounters Network::gather_counters() const {
  GatherCounters g;
  for (const Router& r : routers_) {
    const GatherCounters& c = r.gather_counters();
    g.acks += c.acks;
    g.nacks += c.nacks;
    g.loads += c.loads;
    g.initiated += c.initiated;
  }
  return g;
}

std::uint64_t Network::flits_injected() const {
  std::uint64_t n = 0;
  for (const Router& r : routers_) n += r.flits_injected();
  return n;
}

}  // namespace gnoc
