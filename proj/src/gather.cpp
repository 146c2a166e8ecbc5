#include "gnoc/gather.hpp"

#include <stdexcept>

namespace gnoc {

void GatherUnit::post(const Payload& p, int delta) {
  if (pending) {
    throw std::logic_error("gather unit at " + to_string(p.origin) + " already holds a payload");
  }
  pending = p;
  delta_timer = delta;
  status = GatherStatus::Waiting;
}

LoadCheck gather_load_check(const Flit& head, const GatherUnit& unit, const MeshConfig& cfg) {
  LoadCheck out{false, head};
  if (!head.is_head() || head.packet_type != PacketType::Gather) return out;
  if (!unit.waiting() || !unit.pending) return out;
  const int size = cfg.gather_payload_size;
  if (head.aspace < size) return out;
  if (head.dst != unit.pending->dst) return out;
  const int carried = (cfg.gather_capacity_bits() - head.aspace) / size;
  if (carried >= cfg.eta()) return out;
  out.load = true;
  out.head.aspace -= size;
  return out;
}

UploadOutcome upload_payload(Flit& flit, GatherUnit& unit, GatherLatch& latch,
                             const MeshConfig& cfg) {
  if (flit.is_head()) return UploadOutcome::PassThrough;
  UploadOutcome outcome = UploadOutcome::PassThrough;
  if (latch.load && !latch.uploaded && unit.pending) {
    if (flit.used_bits(cfg.gather_payload_size) + cfg.gather_payload_size <= cfg.flit_width) {
      flit.payloads.push_back(*unit.pending);
      unit.clear();
      latch.uploaded = true;
      outcome = UploadOutcome::Ack;
    } else if (flit.is_tail()) {
      // Granted but never placed: hand the payload back to the timer.
      unit.status = GatherStatus::Waiting;
      outcome = UploadOutcome::Nack;
    } else {
      outcome = UploadOutcome::Deferred;
    }
  } else if (flit.is_tail() && flit.packet_type == PacketType::Gather && unit.waiting()) {
    outcome = UploadOutcome::Nack;
  }
  if (flit.is_tail()) latch = GatherLatch{};
  return outcome;
}

std::optional<Payload> delta_tick(GatherUnit& unit, bool injection_free) {
  if (!unit.waiting() || !unit.pending) return std::nullopt;
  if (unit.delta_timer > 0) {
    --unit.delta_timer;
    return std::nullopt;
  }
  if (!injection_free) return std::nullopt;
  Payload p = *unit.pending;
  unit.clear();
  return p;
}

}  // namespace gnoc
