#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnoc/mesh.hpp"

namespace gnoc {

enum class FlitType : std::uint8_t { Head = 0, Body = 1, Tail = 2 };
enum class PacketType : std::uint8_t { Unicast = 0, Multicast = 1, Gather = 2 };

const char* flit_type_name(FlitType t);
const char* packet_type_name(PacketType t);

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A PE result on its way to the global buffer.
struct Payload {
  NodeId origin;
  std::int32_t value = 0;
  NodeId dst;       // buffer-attached router of the origin's row
  int round = 0;

  friend bool operator==(const Payload&, const Payload&) = default;
};

struct Flit {
  FlitType type = FlitType::Head;
  PacketType packet_type = PacketType::Unicast;
  int aspace = 0;                  // head only: free payload bits
  NodeId src;
  NodeId dst;
  bool to_buffer = true;           // eject through the buffer port at dst
  std::vector<bool> mdst;          // head only, logical; never serialized
  std::vector<Payload> payloads;   // body/tail only
  std::uint64_t packet_id = 0;
  int vc = 0;
  int hops = 0;                    // inter-router links crossed so far
  std::int64_t inject_cycle = 0;
  std::int64_t dst_arrival = -1;   // head entered the destination router

  bool is_head() const { return type == FlitType::Head; }
  bool is_tail() const { return type == FlitType::Tail; }
  int used_bits(int payload_size) const {
    return static_cast<int>(payloads.size()) * payload_size;
  }
};

struct PacketSpec {
  PacketType type = PacketType::Unicast;
  NodeId src;
  NodeId dst;
  bool to_buffer = true;
  std::uint64_t packet_id = 0;
  int vc = 0;
};

/// Packet length in flits for a packet type.
int packet_length(PacketType t, const MeshConfig& cfg);

/// Splits payloads over the body flits first, then the tail. The head's
/// aspace is (len-1)*W minus the bits already carried.
/// Throws CapacityError when the payloads do not fit.
std::vector<Flit> build_packet(const PacketSpec& spec, std::span<const Payload> payloads,
                               const MeshConfig& cfg);

// Fixed bit layout (see docs/wire-format.md).
namespace wire {
inline constexpr int kTypeBits = 2;
inline constexpr int kAspaceBits = 10;
inline constexpr int kNodeBits = 8;
inline constexpr int kPayloadBits = 32;
inline constexpr int kHeadBits = 2 * kTypeBits + kAspaceBits + 2 * kNodeBits + 1;
}  // namespace wire

/// Packs a flit into flit_width bits. MDst, payload origins and bookkeeping
/// fields (packet id, vc, hop count) are not part of the wire image.
std::vector<bool> pack_flit(const Flit& flit, const MeshConfig& cfg);
/// Body and tail flits carry no slot count; pass how many slots are used.
Flit unpack_flit(const std::vector<bool>& bits, const MeshConfig& cfg, int slots = 0);
/// Decodes a whole packet, taking slot counts from the head's aspace.
std::vector<Flit> unpack_packet(const std::vector<std::vector<bool>>& flits, const MeshConfig& cfg);

}  // namespace gnoc
