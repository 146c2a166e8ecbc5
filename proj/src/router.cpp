#include "gnoc/router.hpp"

#include <stdexcept>
#include <string>

namespace gnoc {

Router::Router(const MeshConfig& cfg, NodeId id, std::uint64_t stall_seed, double stall_prob)
    : cfg_(cfg),
      id_(id),
      vcs_(cfg.vc_count),
      inputs_(static_cast<size_t>(kInputPorts * cfg.vc_count)),
      outputs_(static_cast<size_t>(kOutputPorts * cfg.vc_count)),
      vc_rr_(static_cast<size_t>(kOutputPorts * cfg.vc_count), 0),
      stall_rng_(stall_seed),
      stall_prob_(stall_prob) {
  for (int p = 0; p < kOutputPorts; ++p) {
    const Port port = static_cast<Port>(p);
    const bool link = neighbor(cfg_, id_, port).has_value();
    for (int v = 0; v < vcs_; ++v) {
      OutputVc& o = output(p, v);
      o.unlimited = !link;
      o.credits = link ? cfg_.buffer_depth : 0;
    }
  }
}

std::uint64_t Router::next_packet_id() {
  return (static_cast<std::uint64_t>(cfg_.index(id_) + 1) << 40) | ++packet_seq_;
}

void Router::enqueue_injection(std::vector<Flit> packet) {
  for (Flit& f : packet) ni_queue_.push_back(std::move(f));
}

bool Router::empty() const {
  if (!ni_queue_.empty() || unit_.pending) return false;
  for (const InputVc& ivc : inputs_) {
    if (!ivc.queue.empty()) return false;
  }
  return true;
}

int Router::occupancy(Port in, int vc) const {
  return static_cast<int>(input(static_cast<int>(in), vc).queue.size());
}

int Router::credits(Port out, int vc) const { return output(static_cast<int>(out), vc).credits; }

void Router::emit(std::int64_t now, std::string_view kind) const {
  if (events_ && *events_) (*events_)(now, id_, kind);
}

void Router::accept(std::int64_t now, Port in, Flit flit) {
  InputVc& ivc = input(static_cast<int>(in), flit.vc);
  if (static_cast<int>(ivc.queue.size()) >= cfg_.buffer_depth) {
    throw std::logic_error("credit violation: input buffer overflow at " + to_string(id_));
  }
  record(activity_, Activity::BufferWrite);
  if (flit.is_head() && flit.dst == id_) flit.dst_arrival = now;

  // Locally injected packets already carry this node's payload.
  if (in != Port::Local) {
    if (flit.is_head()) {
      LoadCheck lc = gather_load_check(flit, unit_, cfg_);
      if (lc.load) {
        flit = std::move(lc.head);
        unit_.status = GatherStatus::Loading;
        ivc.latch = GatherLatch{true, false};
        ++gather_.loads;
        emit(now, "load");
      }
    } else {
      switch (upload_payload(flit, unit_, ivc.latch, cfg_)) {
        case UploadOutcome::Ack:
          record(activity_, Activity::PayloadUpload);
          ++gather_.acks;
          emit(now, "ack");
          break;
        case UploadOutcome::Nack:
          ++gather_.nacks;
          emit(now, "nack");
          break;
        default:
          break;
      }
    }
  }
  ivc.queue.push_back(BufferedFlit{std::move(flit), now});
}

void Router::tick_gather(std::int64_t now) {
  std::optional<Payload> own = delta_tick(unit_, injection_idle());
  if (!own) return;
  PacketSpec spec;
  spec.type = PacketType::Gather;
  spec.src = id_;
  spec.dst = own->dst;
  spec.to_buffer = true;
  spec.packet_id = next_packet_id();
  spec.vc = 0;
  const Payload mine[] = {*own};
  enqueue_injection(build_packet(spec, mine, cfg_));
  ++gather_.initiated;
  emit(now, "initiate");
}

void Router::inject(std::int64_t now, RouterOutput& out) {
  if (ni_queue_.empty()) return;
  Flit& f = ni_queue_.front();
  if (f.vc < 0 || f.vc >= vcs_) throw ConfigError("injected flit uses an unknown VC");
  if (occupancy(Port::Local, f.vc) >= cfg_.buffer_depth) return;
  Flit flit = std::move(f);
  ni_queue_.pop_front();
  if (flit.is_head()) flit.inject_cycle = now;
  ++flits_injected_;
  out.progressed = true;
  accept(now, Port::Local, std::move(flit));
}

bool Router::switch_ready(std::int64_t now, int port, int vc) const {
  const InputVc& ivc = input(port, vc);
  if (ivc.queue.empty() || !ivc.allocated) return false;
  const BufferedFlit& front = ivc.queue.front();
  if (now < front.arrival + cfg_.pipeline_depth - 1) return false;
  if (front.flit.is_head() && now < ivc.va_cycle + 1) return false;
  const OutputVc& o = output(ivc.out_port, vc);
  return o.unlimited || o.credits > 0;
}

void Router::allocate_switch(std::int64_t now, RouterOutput& out) {
  // Input stage: one VC per input port.
  std::array<int, kInputPorts> pick{};
  pick.fill(-1);
  for (int p = 0; p < kInputPorts; ++p) {
    for (int k = 0; k < vcs_; ++k) {
      const int v = (input_rr_[static_cast<size_t>(p)] + k) % vcs_;
      if (switch_ready(now, p, v)) {
        pick[static_cast<size_t>(p)] = v;
        break;
      }
    }
  }
  // Output stage: one input port per output port.
  for (int o = 0; o < kOutputPorts; ++o) {
    int winner = -1;
    for (int k = 0; k < kInputPorts; ++k) {
      const int p = (switch_rr_[static_cast<size_t>(o)] + k) % kInputPorts;
      const int v = pick[static_cast<size_t>(p)];
      if (v >= 0 && input(p, v).out_port == o) {
        winner = p;
        break;
      }
    }
    if (winner < 0) continue;
    const int v = pick[static_cast<size_t>(winner)];
    switch_rr_[static_cast<size_t>(o)] = (winner + 1) % kInputPorts;
    input_rr_[static_cast<size_t>(winner)] = (v + 1) % vcs_;

    InputVc& ivc = input(winner, v);
    OutputVc& ovc = output(o, v);
    Flit flit = std::move(ivc.queue.front().flit);
    ivc.queue.pop_front();
    record(activity_, Activity::SwArbitration);
    record(activity_, Activity::BufferRead);
    record(activity_, Activity::XbarTraversal);
    record(activity_, Activity::LinkTraversal);
    if (!ovc.unlimited) {
      --ovc.credits;
      if (flit.is_head()) ++flit.hops;
    }
    if (winner != static_cast<int>(Port::Local)) {
      out.credits.push_back(CreditReturn{static_cast<Port>(winner), v});
    }
    if (flit.is_tail()) {
      ovc.owner = -1;
      ivc.allocated = false;
      ivc.out_port = -1;
    }
    out.flits.push_back(SentFlit{static_cast<Port>(o), std::move(flit)});
    out.progressed = true;
  }
}

void Router::allocate_vcs(std::int64_t now) {
  for (int p = 0; p < kInputPorts; ++p) {
    for (int v = 0; v < vcs_; ++v) {
      InputVc& ivc = input(p, v);
      if (ivc.queue.empty() || ivc.allocated) continue;
      const BufferedFlit& front = ivc.queue.front();
      if (!front.flit.is_head()) {
        throw std::logic_error("wormhole violation: body flit without a head at " + to_string(id_));
      }
      if (front.flit.packet_type == PacketType::Multicast) {
        throw ConfigError("multicast packets are not routed");
      }
      if (ivc.out_port < 0) {
        ivc.out_port = static_cast<int>(xy_route(cfg_, id_, front.flit.dst, front.flit.to_buffer));
      }
    }
  }
  for (int o = 0; o < kOutputPorts; ++o) {
    for (int v = 0; v < vcs_; ++v) {
      OutputVc& ovc = output(o, v);
      if (ovc.owner >= 0) continue;
      int& rr = vc_rr_[static_cast<size_t>(o * vcs_ + v)];
      for (int k = 0; k < kInputPorts; ++k) {
        const int p = (rr + k) % kInputPorts;
        InputVc& ivc = input(p, v);
        if (ivc.queue.empty() || ivc.allocated || ivc.out_port != o) continue;
        if (now < ivc.queue.front().arrival) continue;
        ovc.owner = p;
        ivc.allocated = true;
        ivc.va_cycle = now;
        rr = (p + 1) % kInputPorts;
        record(activity_, Activity::VcArbitration);
        break;
      }
    }
  }
}

RouterOutput Router::cycle(std::int64_t now, std::span<const IncomingFlit> arrivals,
                           std::span<const CreditReturn> credits) {
  RouterOutput out;
  for (const CreditReturn& c : credits) {
    OutputVc& o = output(static_cast<int>(c.port), c.vc);
    if (!o.unlimited && ++o.credits > cfg_.buffer_depth) {
      throw std::logic_error("credit overflow at " + to_string(id_));
    }
  }
  for (const IncomingFlit& in : arrivals) accept(now, in.in, in.flit);

  const int timer_before = unit_.delta_timer;
  const bool pending_before = unit_.pending.has_value();
  tick_gather(now);
  if (unit_.delta_timer != timer_before || unit_.pending.has_value() != pending_before) {
    out.progressed = true;
  }

  inject(now, out);

  const bool stalled =
      stall_prob_ > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(stall_rng_) < stall_prob_;
  if (!stalled) allocate_switch(now, out);
  allocate_vcs(now);
  return out;
}

}  // namespace gnoc
