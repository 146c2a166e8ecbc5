#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnoc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeId {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string to_string(NodeId n);

/// Network and gather-protocol parameters. Defaults follow the reference
/// 8x8 configuration (4 VCs, 4-flit buffers, 98-bit flits, 2-flit unicast,
/// 4-flit gather (longer when a row of payloads needs it), 5-stage router, delta = T_MAC = 5, 32-bit payloads).
struct MeshConfig {
  int rows = 8;
  int cols = 8;
  int vc_count = 4;
  int buffer_depth = 4;             // flits per VC
  int flit_width = 98;              // bits
  int unicast_packet_len = 2;       // flits
  std::optional<int> gather_packet_len; // flits; see gather_len()
  int pipeline_depth = 5;           // cycles per hop (kappa)
  int delta = 5;                    // gather timeout, cycles
  int gather_payload_size = 32;     // bits
  std::optional<int> gather_capacity;   // eta; see eta()
  int t_mac = 5;
  std::optional<int> stream_hop_cycles; // operand forwarding delay; defaults to kappa
  std::vector<int> delta_per_node;  // empty, or rows*cols overrides (row-major)

  static MeshConfig square(int n) {
    MeshConfig c;
    c.rows = n;
    c.cols = n;
    return c;
  }

  int node_count() const { return rows * cols; }
  int index(NodeId n) const { return n.row * cols + n.col; }
  NodeId node(int idx) const { return {idx / cols, idx % cols}; }
  bool contains(NodeId n) const {
    return n.row >= 0 && n.row < rows && n.col >= 0 && n.col < cols;
  }
  bool right_edge(NodeId n) const { return n.col == cols - 1; }
  NodeId buffer_node(int row) const { return {row, cols - 1}; }

  /// Gather packet length: 4 flits, or enough body flits for a full row.
  int gather_len() const;
  /// Bits available for payloads in a gather packet: every non-head flit.
  int gather_capacity_bits() const { return (gather_len() - 1) * flit_width; }
  int payloads_per_flit() const { return flit_width / gather_payload_size; }
  /// Payloads per gather packet; min(M, what fits) unless set explicitly.
  int eta() const;
  int stream_hop() const { return stream_hop_cycles.value_or(pipeline_depth); }
  int delta_at(NodeId n) const;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

enum class Port : int { Local = 0, North = 1, East = 2, South = 3, West = 4, Buffer = 5 };

inline constexpr int kInputPorts = 5;
inline constexpr int kOutputPorts = 6;

const char* port_name(Port p);

/// Dimension-ordered route: columns are resolved before rows. The buffer
/// port exists only on right-edge routers.
Port xy_route(const MeshConfig& cfg, NodeId current, NodeId dst, bool sink_is_buffer);

/// Neighbor reached through an output port; nullopt off-mesh or for sinks.
std::optional<NodeId> neighbor(const MeshConfig& cfg, NodeId n, Port p);

/// Input port on the neighbor that an output port feeds.
Port opposite(Port p);

int manhattan_hops(NodeId src, NodeId dst, bool plus_buffer = false);

struct HopPath {
  std::vector<NodeId> nodes;
  bool ends_at_buffer = false;

  /// Links traversed, counting the buffer link when present.
  int hops() const {
    return static_cast<int>(nodes.size()) - 1 + (ends_at_buffer ? 1 : 0);
  }
};

/// Walks xy_route from src until the packet would eject.
HopPath trace_route(const MeshConfig& cfg, NodeId src, NodeId dst, bool sink_is_buffer);

}  // namespace gnoc
