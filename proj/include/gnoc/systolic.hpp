#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gnoc/mesh.hpp"
#include "gnoc/network.hpp"
#include "gnoc/power.hpp"
#include "gnoc/workload.hpp"

namespace gnoc {

enum class CollectionMode { RepetitiveUnicast, Gather };

const char* mode_name(CollectionMode m);  // "ru" / "gather"

std::int64_t pe_mac(std::int64_t acc, std::int32_t input, std::int32_t weight);

/// Plain dot product of one input vector with one filter vector.
/// Throws std::invalid_argument on a length mismatch.
std::int64_t partial_conv_oracle(std::span<const std::int32_t> input,
                                 std::span<const std::int32_t> filter);

/// im2col operands of a layer: P input vectors and Q filters, each of
/// length C*R*R, drawn as signed 8-bit values from a seeded generator.
class OperandSet {
 public:
  static OperandSet generate(const LayerConfig& layer, std::uint64_t seed);

  std::int64_t stream_length() const { return length_; }
  std::int64_t input_count() const { return inputs_count_; }
  std::int64_t filter_count() const { return filters_count_; }
  std::span<const std::int32_t> input(std::int64_t i) const;
  std::span<const std::int32_t> filter(std::int64_t k) const;

 private:
  std::int64_t length_ = 0;
  std::int64_t inputs_count_ = 0;
  std::int64_t filters_count_ = 0;
  std::vector<std::int32_t> inputs_;
  std::vector<std::int32_t> filters_;
};

struct PEState {
  std::int64_t accumulator = 0;
  std::int64_t received_count = 0;
  std::int32_t input_reg = 0;
  std::int32_t weight_reg = 0;
  std::int64_t busy_until = 0;
};

/// Which input vector each row and which filter each column works on.
struct RoundSchedule {
  std::int64_t round = 0;
  std::vector<std::int64_t> row_inputs;   // -1: idle row
  std::vector<std::int64_t> col_filters;  // -1: idle column
  std::int64_t stream_length = 0;

  bool active(NodeId n) const {
    return row_inputs[static_cast<size_t>(n.row)] >= 0 &&
           col_filters[static_cast<size_t>(n.col)] >= 0;
  }
};

RoundSchedule make_schedule(const LayerConfig& layer, const MeshConfig& mesh, std::int64_t round);

/// A finished PE result ready for collection.
struct PostEvent {
  NodeId pe;
  std::int64_t cycle = 0;             // MAC done, payload handed to the router
  std::int64_t last_operand_cycle = 0;
  std::int64_t accumulator = 0;
};

struct StreamResult {
  std::vector<PEState> pes;           // row-major, one per mesh node
  std::vector<PostEvent> posts;       // active PEs only, row-major
};

/// Streams one round. Operand j enters the left/top edge PEs at
/// start + 1 + j and moves one PE per stream_hop cycles, so PE (r, c)
/// sees it at start + 1 + j + (r + c) * hop and finishes T_MAC cycles
/// after its last operand.
StreamResult stream_round(const RoundSchedule& schedule, const MeshConfig& mesh,
                          const OperandSet& operands, std::int64_t start);

struct RunOptions {
  std::uint64_t seed = 1;
  double stall_prob = 0.0;
  int post_jitter = 0;                 // max random delay before a PE posts
  std::ostream* event_log = nullptr;   // "cycle node kind" lines
  std::int64_t max_round_cycles = 1'000'000;
};

struct DeliveredResult {
  int round = 0;
  NodeId origin;
  std::int32_t value = 0;

  friend auto operator<=>(const DeliveredResult&, const DeliveredResult&) = default;
};

struct RoundStats {
  std::int64_t start = 0;
  std::int64_t end = 0;          // last tail reached the buffer
  std::int64_t collection = 0;   // end - latest first-post of a row
  std::int64_t congestion = 0;   // end - critical-path ideal end (>= 0)
};

struct RunStats {
  std::string model;
  std::string layer;
  int rows = 0;
  int cols = 0;
  CollectionMode mode = CollectionMode::RepetitiveUnicast;
  std::int64_t total_cycles = 0;
  std::vector<RoundStats> rounds;
  std::uint64_t packets = 0;
  std::uint64_t hops = 0;
  std::uint64_t flits = 0;
  std::uint64_t flits_injected = 0;
  std::uint64_t flits_ejected = 0;
  std::uint64_t timeouts = 0;      // gather packets started after a delta expiry
  std::uint64_t oracle_checks = 0;
  GatherCounters gather;
  ActivityCounters activity;       // routers + operand streaming
  double energy = 0.0;
  std::vector<DeliveredResult> delivered;  // sorted

  std::int64_t collection_total() const;
  double mean_congestion() const;
};

/// Runs every round of a layer with the chosen collection scheme. Each round
/// streams, computes and then collects all N*M results before the next one
/// starts. Throws LostPayloadError, OracleMismatchError, DrainError,
/// DeadlockError or ProtocolError on any violated invariant.
RunStats run_convolution(const LayerConfig& layer, const MeshConfig& mesh, CollectionMode mode,
                         const RunOptions& options = {}, const EnergyCoefficients& energy = {});

/// One row of ready PEs sending to the row's buffer, no streaming: PE (row, c)
/// posts at c * stream_hop. Used for the hop-count illustration.
RunStats run_row_collection(const MeshConfig& mesh, int row, CollectionMode mode,
                            const RunOptions& options = {});

}  // namespace gnoc
