#include "gnoc/mesh.hpp"

#include <algorithm>
#include <cstdlib>

namespace gnoc {

std::string to_string(NodeId n) {
  return "(" + std::to_string(n.row) + "," + std::to_string(n.col) + ")";
}

int MeshConfig::eta() const {
  if (gather_capacity) return *gather_capacity;
  const int fit = gather_capacity_bits() / gather_payload_size;
  return std::min(cols, fit);
}

int MeshConfig::gather_len() const {
  if (gather_packet_len) return *gather_packet_len;
  const int per_flit = std::max(1, payloads_per_flit());
  return std::max(4, 1 + (cols + per_flit - 1) / per_flit);
}

int MeshConfig::delta_at(NodeId n) const {
  if (delta_per_node.empty()) return delta;
  return delta_per_node.at(static_cast<size_t>(index(n)));
}

void MeshConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(rows >= 1 && cols >= 1, "mesh dimensions must be positive");
  require(vc_count >= 1, "vc_count must be >= 1");
  require(buffer_depth >= 1, "buffer_depth must be >= 1");
  require(unicast_packet_len >= 2, "unicast packets need a head and a tail flit");
  require(gather_len() >= 2, "gather packets need a head and a tail flit");
  require(pipeline_depth >= 2, "the simulated router needs at least 2 pipeline stages");
  require(delta >= 0 && t_mac >= 0, "delta and t_mac must be non-negative");
  require(gather_payload_size >= 1, "gather_payload_size must be positive");
  require(gather_payload_size <= flit_width, "a gather payload must fit in one flit");
  require(stream_hop() >= 1, "stream_hop_cycles must be >= 1");
  require(eta() >= 1, "gather capacity eta must be >= 1");
  require(static_cast<long>(eta()) * gather_payload_size <= gather_capacity_bits(),
          "eta payloads exceed the gather packet's non-head capacity");
  // Bit accounting must never admit a payload that no flit can hold.
  require(payloads_per_flit() * (gather_len() - 1) >=
              gather_capacity_bits() / gather_payload_size,
          "gather payload size does not pack evenly into flits");
  if (!delta_per_node.empty()) {
    require(static_cast<int>(delta_per_node.size()) == node_count(),
            "delta_per_node must have rows*cols entries");
    require(std::all_of(delta_per_node.begin(), delta_per_node.end(),
                        [](int d) { return d >= 0; }),
            "per-node delta must be non-negative");
  }
}

const char* port_name(Port p) {
  switch (p) {
    case Port::Local: return "local";
    case Port::North: return "north";
    case Port::East: return "east";
    case Port::South: return "south";
    case Port::West: return "west";
    case Port::Buffer: return "buffer";
  }
  return "?";
}

Port xy_route(const MeshConfig& cfg, NodeId current, NodeId dst, bool sink_is_buffer) {
  if (!cfg.contains(current) || !cfg.contains(dst)) {
    throw ConfigError("route endpoint outside the mesh");
  }
  if (current.col < dst.col) return Port::East;
  if (current.col > dst.col) return Port::West;
  if (current.row < dst.row) return Port::South;
  if (current.row > dst.row) return Port::North;
  if (!sink_is_buffer) return Port::Local;
  if (!cfg.right_edge(current)) {
    throw ConfigError("buffer port requested at non-right-edge node " + to_string(current));
  }
  return Port::Buffer;
}

std::optional<NodeId> neighbor(const MeshConfig& cfg, NodeId n, Port p) {
  NodeId m = n;
  switch (p) {
    case Port::North: --m.row; break;
    case Port::South: ++m.row; break;
    case Port::East: ++m.col; break;
    case Port::West: --m.col; break;
    default: return std::nullopt;
  }
  if (!cfg.contains(m)) return std::nullopt;
  return m;
}

Port opposite(Port p) {
  switch (p) {
    case Port::North: return Port::South;
    case Port::South: return Port::North;
    case Port::East: return Port::West;
    case Port::West: return Port::East;
    default: return p;
  }
}

int manhattan_hops(NodeId src, NodeId dst, bool plus_buffer) {
  return std::abs(src.row - dst.row) + std::abs(src.col - dst.col) + (plus_buffer ? 1 : 0);
}

HopPath trace_route(const MeshConfig& cfg, NodeId src, NodeId dst, bool sink_is_buffer) {
  HopPath path;
  NodeId cur = src;
  path.nodes.push_back(cur);
  for (;;) {
    const Port p = xy_route(cfg, cur, dst, sink_is_buffer);
    if (p == Port::Local) break;
    if (p == Port::Buffer) {
      path.ends_at_buffer = true;
      break;
    }
    cur = *neighbor(cfg, cur, p);
    path.nodes.push_back(cur);
  }
  return path;
}

}  // namespace gnoc
