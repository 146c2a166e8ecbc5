#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "gnoc/flit.hpp"
#include "gnoc/gather.hpp"
#include "gnoc/mesh.hpp"
#include "gnoc/power.hpp"

namespace gnoc {

/// Sink for the optional per-cycle event log: (cycle, node, kind).
using EventSink = std::function<void(std::int64_t, NodeId, std::string_view)>;

struct IncomingFlit {
  Port in = Port::Local;
  Flit flit;
};

struct SentFlit {
  Port out = Port::Local;
  Flit flit;
};

/// A freed input-buffer slot, reported to whoever feeds that input port.
struct CreditReturn {
  Port port = Port::Local;
  int vc = 0;
};

struct RouterOutput {
  std::vector<SentFlit> flits;
  std::vector<CreditReturn> credits;  // keyed by this router's input port
  bool progressed = false;
};

struct GatherCounters {
  std::uint64_t acks = 0;
  std::uint64_t nacks = 0;
  std::uint64_t loads = 0;
  std::uint64_t initiated = 0;
};

/// Input-queued virtual-channel router with credit flow control.
///
/// A flit written into an input buffer at cycle a may win the switch at
/// a + kappa - 1 at the earliest and lands in the downstream buffer one
/// cycle later, so an uncontended hop costs exactly kappa cycles. Heads
/// compute their route and allocate an output VC before switch allocation;
/// body and tail flits only wait out those stages, which is where pending
/// gather payloads are merged into passing gather packets.
///
/// Packets keep the VC index they were injected on. VC and switch
/// allocation are round-robin; switch allocation is input-first separable.
class Router {
 public:
  Router(const MeshConfig& cfg, NodeId id, std::uint64_t stall_seed = 0, double stall_prob = 0.0);

  NodeId id() const { return id_; }
  GatherUnit& gather_unit() { return unit_; }
  const GatherUnit& gather_unit() const { return unit_; }

  /// Queues a packet at the network interface; flits enter the local input
  /// port one per cycle as buffer space allows.
  void enqueue_injection(std::vector<Flit> packet);
  bool injection_idle() const { return ni_queue_.empty(); }
  std::uint64_t next_packet_id();

  /// Advances one cycle. `arrivals` and `credits` were produced by the
  /// neighbors in the previous cycle; credits name this router's outputs.
  RouterOutput cycle(std::int64_t now, std::span<const IncomingFlit> arrivals,
                     std::span<const CreditReturn> credits);

  bool empty() const;
  int occupancy(Port in, int vc) const;
  int credits(Port out, int vc) const;

  const ActivityCounters& activity() const { return activity_; }
  const GatherCounters& gather_counters() const { return gather_; }
  std::uint64_t flits_injected() const { return flits_injected_; }

  void set_event_sink(const EventSink* sink) { events_ = sink; }

 private:
  struct BufferedFlit {
    Flit flit;
    std::int64_t arrival = 0;
  };

  struct InputVc {
    std::deque<BufferedFlit> queue;
    int out_port = -1;  // route of the packet at the front
    bool allocated = false;
    std::int64_t va_cycle = 0;
    GatherLatch latch;
  };

  struct OutputVc {
    int credits = 0;
    bool unlimited = false;  // sinks and off-mesh ports never backpressure
    int owner = -1;          // input port holding this VC, -1 when free
  };

  InputVc& input(int port, int vc) { return inputs_[static_cast<size_t>(port * vcs_ + vc)]; }
  const InputVc& input(int port, int vc) const {
    return inputs_[static_cast<size_t>(port * vcs_ + vc)];
  }
  OutputVc& output(int port, int vc) { return outputs_[static_cast<size_t>(port * vcs_ + vc)]; }
  const OutputVc& output(int port, int vc) const {
    return outputs_[static_cast<size_t>(port * vcs_ + vc)];
  }

  void accept(std::int64_t now, Port in, Flit flit);
  void tick_gather(std::int64_t now);
  void inject(std::int64_t now, RouterOutput& out);
  bool switch_ready(std::int64_t now, int port, int vc) const;
  void allocate_switch(std::int64_t now, RouterOutput& out);
  void allocate_vcs(std::int64_t now);
  void emit(std::int64_t now, std::string_view kind) const;

  MeshConfig cfg_;
  NodeId id_;
  int vcs_;
  std::vector<InputVc> inputs_;
  std::vector<OutputVc> outputs_;
  std::array<int, kInputPorts> input_rr_{};
  std::array<int, kOutputPorts> switch_rr_{};
  std::vector<int> vc_rr_;  // per (output port, vc)
  std::deque<Flit> ni_queue_;
  GatherUnit unit_;
  ActivityCounters activity_;
  GatherCounters gather_;
  std::uint64_t flits_injected_ = 0;
  std::uint64_t packet_seq_ = 0;
  std::mt19937_64 stall_rng_;
  double stall_prob_;
  const EventSink* events_ = nullptr;
};

}  // namespace gnoc
