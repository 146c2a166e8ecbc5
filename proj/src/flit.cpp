#include "gnoc/flit.hpp"

#include <algorithm>

#include <string>

namespace gnoc {

const char* flit_type_name(FlitType t) {
  switch (t) {
    case FlitType::Head: return "head";
    case FlitType::Body: return "body";
    case FlitType::Tail: return "tail";
  }
  return "?";
}

const char* packet_type_name(PacketType t) {
  switch (t) {
    case PacketType::Unicast: return "unicast";
    case PacketType::Multicast: return "multicast";
    case PacketType::Gather: return "gather";
  }
  return "?";
}

int packet_length(PacketType t, const MeshConfig& cfg) {
  return t == PacketType::Gather ? cfg.gather_len() : cfg.unicast_packet_len;
}

std::vector<Flit> build_packet(const PacketSpec& spec, std::span<const Payload> payloads,
                               const MeshConfig& cfg) {
  const int len = packet_length(spec.type, cfg);
  const int per_flit = cfg.payloads_per_flit();
  const long bits = static_cast<long>(payloads.size()) * cfg.gather_payload_size;
  const long capacity = static_cast<long>(len - 1) * cfg.flit_width;
  if (bits > capacity || static_cast<long>(payloads.size()) > static_cast<long>(len - 1) * per_flit) {
    throw CapacityError(std::to_string(payloads.size()) + " payloads do not fit a " +
                        std::to_string(len) + "-flit " + packet_type_name(spec.type) + " packet");
  }

  std::vector<Flit> flits(static_cast<size_t>(len));
  for (int i = 0; i < len; ++i) {
    Flit& f = flits[static_cast<size_t>(i)];
    f.type = i == 0 ? FlitType::Head : (i == len - 1 ? FlitType::Tail : FlitType::Body);
    f.packet_type = spec.type;
    f.src = spec.src;
    f.dst = spec.dst;
    f.to_buffer = spec.to_buffer;
    f.packet_id = spec.packet_id;
    f.vc = spec.vc;
  }
  Flit& head = flits.front();
  head.aspace = static_cast<int>(capacity - bits);
  if (spec.type == PacketType::Multicast) head.mdst.assign(static_cast<size_t>(cfg.node_count()), false);

  size_t next = 0;
  for (int i = 1; i < len && next < payloads.size(); ++i) {
    auto& slots = flits[static_cast<size_t>(i)].payloads;
    while (static_cast<int>(slots.size()) < per_flit && next < payloads.size()) {
      slots.push_back(payloads[next++]);
    }
  }
  return flits;
}

namespace {

class BitWriter {
 public:
  explicit BitWriter(std::vector<bool>& out) : out_(out) {}
  void put(std::uint64_t value, int width) {
    if (pos_ + width > static_cast<int>(out_.size())) {
      throw CapacityError("flit fields exceed the flit width");
    }
    if (width < 64 && value >> width) throw CapacityError("field value exceeds its bit width");
    for (int b = width - 1; b >= 0; --b) out_[static_cast<size_t>(pos_++)] = (value >> b) & 1U;
  }

 private:
  std::vector<bool>& out_;
  int pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const std::vector<bool>& in) : in_(in) {}
  std::uint64_t get(int width) {
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v = (v << 1) | (in_.at(static_cast<size_t>(pos_++)) ? 1U : 0U);
    return v;
  }

 private:
  const std::vector<bool>& in_;
  int pos_ = 0;
};

}  // namespace

std::vector<bool> pack_flit(const Flit& flit, const MeshConfig& cfg) {
  using namespace wire;
  std::vector<bool> bits(static_cast<size_t>(cfg.flit_width), false);
  BitWriter w(bits);
  w.put(static_cast<unsigned>(flit.type), kTypeBits);
  if (flit.is_head()) {
    w.put(static_cast<unsigned>(flit.packet_type), kTypeBits);
    w.put(static_cast<std::uint64_t>(flit.aspace), kAspaceBits);
    w.put(static_cast<std::uint64_t>(cfg.index(flit.src)), kNodeBits);
    w.put(static_cast<std::uint64_t>(cfg.index(flit.dst)), kNodeBits);
    w.put(flit.to_buffer ? 1 : 0, 1);
  } else {
    if (static_cast<int>(flit.payloads.size()) > cfg.payloads_per_flit()) {
      throw CapacityError("flit carries more payloads than slots");
    }
    for (const Payload& p : flit.payloads) {
      w.put(static_cast<std::uint32_t>(p.value), kPayloadBits);
    }
  }
  return bits;
}

Flit unpack_flit(const std::vector<bool>& bits, const MeshConfig& cfg, int slots) {
  using namespace wire;
  BitReader r(bits);
  Flit f;
  f.type = static_cast<FlitType>(r.get(kTypeBits));
  if (f.is_head()) {
    f.packet_type = static_cast<PacketType>(r.get(kTypeBits));
    f.aspace = static_cast<int>(r.get(kAspaceBits));
    f.src = cfg.node(static_cast<int>(r.get(kNodeBits)));
    f.dst = cfg.node(static_cast<int>(r.get(kNodeBits)));
    f.to_buffer = r.get(1) != 0;
  } else {
    for (int i = 0; i < slots; ++i) {
      Payload p;
      p.value = static_cast<std::int32_t>(static_cast<std::uint32_t>(r.get(kPayloadBits)));
      f.payloads.push_back(p);
    }
  }
  return f;
}

std::vector<Flit> unpack_packet(const std::vector<std::vector<bool>>& flits, const MeshConfig& cfg) {
  std::vector<Flit> out;
  if (flits.empty()) return out;
  out.push_back(unpack_flit(flits.front(), cfg));
  const Flit& head = out.front();
  if (!head.is_head()) throw CapacityError("packet does not start with a head flit");
  // Slots fill in flit order, so the head's free space fixes every count.
  const int len = static_cast<int>(flits.size());
  int left = ((len - 1) * cfg.flit_width - head.aspace) / cfg.gather_payload_size;
  for (int i = 1; i < len; ++i) {
    const int here = std::min(left, cfg.payloads_per_flit());
    out.push_back(unpack_flit(flits[static_cast<size_t>(i)], cfg, here));
    left -= here;
    Flit& f = out.back();
    f.packet_type = head.packet_type;
    f.src = head.src;
    f.dst = head.dst;
    f.to_buffer = head.to_buffer;
  }
  return out;
}

}  // namespace gnoc
