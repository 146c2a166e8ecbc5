#include <algorithm>
#include <random>

#include "doctest.h"
#include "gnoc/flit.hpp"

using namespace gnoc;

namespace {

Payload payload(int col, int value) { return Payload{{0, col}, value, {0, 7}, 0}; }

PacketSpec gather_spec() {
  PacketSpec s;
  s.type = PacketType::Gather;
  s.src = {0, 0};
  s.dst = {0, 7};
  return s;
}

}  // namespace

TEST_CASE("gather head advertises the remaining bits") {
  const MeshConfig m;
  const Payload one[] = {payload(0, 5)};
  auto flits = build_packet(gather_spec(), one, m);
  REQUIRE(flits.size() == 4);
  CHECK(flits[0].aspace == 262);
  CHECK(flits[1].payloads.size() == 1);
  CHECK(flits[3].is_tail());

  auto empty = build_packet(gather_spec(), {}, m);
  CHECK(empty[0].aspace == 294);
}

TEST_CASE("unicast packets are two flits") {
  const MeshConfig m;
  PacketSpec s;
  s.src = {3, 1};
  s.dst = {3, 7};
  const Payload one[] = {payload(1, -9)};
  auto flits = build_packet(s, one, m);
  REQUIRE(flits.size() == 2);
  CHECK(flits[0].is_head());
  CHECK(flits[1].is_tail());
  CHECK(flits[1].payloads.front().value == -9);
}

TEST_CASE("payloads beyond the capacity are rejected") {
  const MeshConfig m;
  std::vector<Payload> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(payload(i % 8, i));
  CHECK_THROWS_AS(build_packet(gather_spec(), ten, m), CapacityError);
  ten.resize(9);
  CHECK_NOTHROW(build_packet(gather_spec(), ten, m));

  PacketSpec uni;
  const Payload four[] = {payload(0, 1), payload(1, 2), payload(2, 3), payload(3, 4)};
  CHECK_THROWS_AS(build_packet(uni, four, m), CapacityError);
}

TEST_CASE("aspace after k payloads equals capacity minus k*s") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    MeshConfig m;
    m.gather_payload_size = std::uniform_int_distribution<int>(1, 98)(rng);
    const int fit = m.payloads_per_flit() * (m.gather_len() - 1);
    const int k = std::uniform_int_distribution<int>(0, fit)(rng);
    std::vector<Payload> ps(static_cast<size_t>(k), payload(0, 1));
    auto flits = build_packet(gather_spec(), ps, m);
    CHECK(flits[0].aspace == m.gather_capacity_bits() - k * m.gather_payload_size);
    size_t carried = 0;
    for (const Flit& f : flits) {
      CHECK(f.used_bits(m.gather_payload_size) <= m.flit_width);
      carried += f.payloads.size();
    }
    CHECK(carried == static_cast<size_t>(k));
  }
}

TEST_CASE("wire image round trips") {
  std::mt19937 rng(11);
  for (int n : {4, 8, 16}) {
    const MeshConfig m = MeshConfig::square(n);
    for (int trial = 0; trial < 100; ++trial) {
      std::uniform_int_distribution<int> node(0, m.node_count() - 1);
      PacketSpec s = gather_spec();
      s.src = m.node(node(rng));
      s.dst = m.buffer_node(s.src.row);
      const int k = std::uniform_int_distribution<int>(0, m.eta())(rng);
      std::vector<Payload> ps;
      for (int i = 0; i < k; ++i) {
        ps.push_back(payload(0, std::uniform_int_distribution<std::int32_t>(INT32_MIN, INT32_MAX)(rng)));
      }
      const auto flits = build_packet(s, ps, m);
      std::vector<std::vector<bool>> wire;
      for (const Flit& f : flits) {
        wire.push_back(pack_flit(f, m));
        REQUIRE(wire.back().size() == static_cast<size_t>(m.flit_width));
      }
      const auto back = unpack_packet(wire, m);
      REQUIRE(back.size() == flits.size());
      CHECK(back[0].packet_type == flits[0].packet_type);
      CHECK(back[0].aspace == flits[0].aspace);
      CHECK(back[0].src == flits[0].src);
      CHECK(back[0].dst == flits[0].dst);
      CHECK(back[0].to_buffer == flits[0].to_buffer);
      for (size_t i = 0; i < flits.size(); ++i) {
        CHECK(back[i].type == flits[i].type);
        REQUIRE(back[i].payloads.size() == flits[i].payloads.size());
        for (size_t j = 0; j < flits[i].payloads.size(); ++j) {
          CHECK(back[i].payloads[j].value == flits[i].payloads[j].value);
        }
      }
    }
  }
}

TEST_CASE("a full body flit uses every bit") {
  const MeshConfig m;
  const Payload three[] = {payload(0, -1), payload(1, -1), payload(2, -1)};
  const auto flits = build_packet(gather_spec(), three, m);
  const auto bits = pack_flit(flits[1], m);
  // Body type code 01, then 96 one bits.
  CHECK(std::count(bits.begin(), bits.end(), true) == 1 + 96);
  Flit over = flits[1];
  over.payloads.push_back(payload(3, 1));
  CHECK_THROWS_AS(pack_flit(over, m), CapacityError);
}

TEST_CASE("multicast heads carry a destination mask") {
  const MeshConfig m = MeshConfig::square(4);
  PacketSpec s;
  s.type = PacketType::Multicast;
  auto flits = build_packet(s, {}, m);
  CHECK(flits[0].mdst.size() == 16);
}
