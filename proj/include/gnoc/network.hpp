#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "gnoc/flit.hpp"
#include "gnoc/mesh.hpp"
#include "gnoc/power.hpp"
#include "gnoc/router.hpp"

namespace gnoc {

/// Base for every condition that aborts a simulation.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DeadlockError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};
class ProtocolError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};
class LostPayloadError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};
class OracleMismatchError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};
class DrainError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

struct SimOptions {
  double stall_prob = 0.0;      // per-router chance of skipping switch allocation
  std::uint64_t seed = 1;
  std::int64_t watchdog_cycles = 100000;
};

/// A packet fully received by a sink (buffer port or local ejection).
struct DeliveredPacket {
  std::uint64_t id = 0;
  PacketType type = PacketType::Unicast;
  NodeId src;
  NodeId dst;
  int vc = 0;
  int hops = 0;
  int flits = 0;
  int aspace = 0;
  std::int64_t inject_cycle = 0;
  std::int64_t dst_arrival = 0;  // head entered the destination router
  std::int64_t head_cycle = 0;   // head reached the sink
  std::int64_t tail_cycle = 0;
  std::vector<Payload> payloads;
};

/// N x M mesh of routers advanced in lock-step. Every router reads only what
/// its neighbors produced in the previous cycle, so the order routers are
/// visited within a cycle cannot change the outcome.
class Network {
 public:
  explicit Network(const MeshConfig& cfg, SimOptions opts = {});

  const MeshConfig& config() const { return cfg_; }
  Router& router(NodeId n) { return routers_[static_cast<size_t>(cfg_.index(n))]; }
  const Router& router(NodeId n) const { return routers_[static_cast<size_t>(cfg_.index(n))]; }

  std::int64_t now() const { return now_; }
  /// Jumps the clock forward; only legal while the network is idle.
  void advance_to(std::int64_t cycle);

  void inject(NodeId at, std::vector<Flit> packet);
  /// Builds and queues a unicast carrying `p` from `src` to p.dst's buffer.
  std::uint64_t send_unicast(NodeId src, const Payload& p, int vc = 0);
  /// Hands a result to the router's gather unit.
  void post_payload(NodeId at, const Payload& p, int delta);

  void step();
  bool idle() const;

  std::vector<DeliveredPacket> take_delivered();

  ActivityCounters activity() const;
  GatherCounters gather_counters() const;
  std::uint64_t flits_injected() const;
  std::uint64_t flits_ejected() const { return flits_ejected_; }

  void set_event_sink(EventSink sink);

 private:
  void deliver(NodeId at, Port sink, Flit flit);

  MeshConfig cfg_;
  SimOptions opts_;
  std::vector<Router> routers_;
  std::vector<std::vector<IncomingFlit>> arrivals_;
  std::vector<std::vector<CreditReturn>> credits_;
  std::int64_t now_ = 0;
  std::int64_t last_progress_ = 0;
  std::uint64_t flits_ejected_ = 0;
  std::uint64_t in_flight_links_ = 0;

  // Reassembly at sinks, keyed by (node index, sink port, vc).
  std::map<std::tuple<int, int, int>, DeliveredPacket> open_;
  std::vector<DeliveredPacket> delivered_;
  EventSink events_;
};

}  // namespace gnoc
