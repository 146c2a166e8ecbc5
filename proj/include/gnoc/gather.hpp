#pragma once

#include <optional>

#include "gnoc/flit.hpp"
#include "gnoc/mesh.hpp"

namespace gnoc {

enum class GatherStatus { Idle, Waiting, Loading };

/// Router-side holder for the local PE's result (the "Gather Payload"
/// block). Holds at most one payload; a pending payload either rides a
/// passing gather packet or, once its delta timer expires, leaves in a
/// gather packet of its own.
struct GatherUnit {
  std::optional<Payload> pending;
  int delta_timer = 0;
  GatherStatus status = GatherStatus::Idle;

  bool waiting() const { return status == GatherStatus::Waiting; }

  /// Throws std::logic_error if a payload is already pending.
  void post(const Payload& p, int delta);
  void clear() {
    pending.reset();
    delta_timer = 0;
    status = GatherStatus::Idle;
  }
};

/// Per input-VC latch between a gather head and its tail.
struct GatherLatch {
  bool load = false;
  bool uploaded = false;
};

struct LoadCheck {
  bool load = false;
  Flit head;
};

/// Load signal for an arriving head: gather type, enough ASpace, matching
/// destination and a waiting payload. On load the returned head already
/// carries the decremented ASpace. The packet's payload count is also
/// capped at eta.
LoadCheck gather_load_check(const Flit& head, const GatherUnit& unit, const MeshConfig& cfg);

enum class UploadOutcome {
  PassThrough,  // nothing to do for this flit
  Ack,          // payload appended, unit cleared
  Deferred,     // loading, but this flit is full; try the next one
  Nack,         // tail passed without taking the waiting payload
};

/// Body/tail handling while the packet streams through the RC/VA stages.
/// Clears the latch when the tail passes.
UploadOutcome upload_payload(Flit& flit, GatherUnit& unit, GatherLatch& latch,
                             const MeshConfig& cfg);

/// One cycle of the delta timer. Returns the payload to send in a
/// self-initiated gather packet when the timer has run out and the
/// injection port is free; the unit is cleared in that case.
std::optional<Payload> delta_tick(GatherUnit& unit, bool injection_free);

}  // namespace gnoc
