#include "gnoc/systolic.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gnoc {

const char* mode_name(CollectionMode m) {
  return m == CollectionMode::Gather ? "gather" : "ru";
}

std::int64_t pe_mac(std::int64_t acc, std::int32_t input, std::int32_t weight) {
  return acc + static_cast<std::int64_t>(input) * weight;
}

std::int64_t partial_conv_oracle(std::span<const std::int32_t> input,
                                 std::span<const std::int32_t> filter) {
  if (input.size() != filter.size()) {
    throw std::invalid_argument("input and filter vectors differ in length");
  }
  std::int64_t sum = 0;
  for (size_t j = 0; j < input.size(); ++j) {
    sum += static_cast<std::int64_t>(input[j]) * static_cast<std::int64_t>(filter[j]);
  }
  return sum;
}

OperandSet OperandSet::generate(const LayerConfig& layer, std::uint64_t seed) {
  OperandSet s;
  s.length_ = gnoc::stream_length(layer);
  s.inputs_count_ = layer.inputs;
  s.filters_count_ = layer.kernels;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(-128, 127);
  s.inputs_.resize(static_cast<size_t>(s.inputs_count_ * s.length_));
  s.filters_.resize(static_cast<size_t>(s.filters_count_ * s.length_));
  for (auto& v : s.inputs_) v = byte(rng);
  for (auto& v : s.filters_) v = byte(rng);
  return s;
}

std::span<const std::int32_t> OperandSet::input(std::int64_t i) const {
  return {inputs_.data() + i * length_, static_cast<size_t>(length_)};
}

std::span<const std::int32_t> OperandSet::filter(std::int64_t k) const {
  return {filters_.data() + k * length_, static_cast<size_t>(length_)};
}

RoundSchedule make_schedule(const LayerConfig& layer, const MeshConfig& mesh, std::int64_t round) {
  const std::int64_t filter_groups = (layer.kernels + mesh.cols - 1) / mesh.cols;
  const std::int64_t input_group = round / filter_groups;
  const std::int64_t filter_group = round % filter_groups;
  RoundSchedule s;
  s.round = round;
  s.stream_length = stream_length(layer);
  for (int r = 0; r < mesh.rows; ++r) {
    const std::int64_t i = input_group * mesh.rows + r;
    s.row_inputs.push_back(i < layer.inputs ? i : -1);
  }
  for (int c = 0; c < mesh.cols; ++c) {
    const std::int64_t k = filter_group * mesh.cols + c;
    s.col_filters.push_back(k < layer.kernels ? k : -1);
  }
  return s;
}

StreamResult stream_round(const RoundSchedule& schedule, const MeshConfig& mesh,
                          const OperandSet& operands, std::int64_t start) {
  StreamResult out;
  out.pes.resize(static_cast<size_t>(mesh.node_count()));
  const std::int64_t len = schedule.stream_length;
  const int hop = mesh.stream_hop();
  for (int r = 0; r < mesh.rows; ++r) {
    for (int c = 0; c < mesh.cols; ++c) {
      const NodeId n{r, c};
      if (!schedule.active(n)) continue;
      auto in = operands.input(schedule.row_inputs[static_cast<size_t>(r)]);
      auto w = operands.filter(schedule.col_filters[static_cast<size_t>(c)]);
      PEState& pe = out.pes[static_cast<size_t>(mesh.index(n))];
      for (std::int64_t j = 0; j < len; ++j) {
        pe.input_reg = in[static_cast<size_t>(j)];
        pe.weight_reg = w[static_cast<size_t>(j)];
        pe.accumulator = pe_mac(pe.accumulator, pe.input_reg, pe.weight_reg);
        ++pe.received_count;
      }
      const std::int64_t last = start + len + static_cast<std::int64_t>(r + c) * hop;
      pe.busy_until = last + mesh.t_mac;
      out.posts.push_back(PostEvent{n, pe.busy_until, last, pe.accumulator});
    }
  }
  return out;
}

std::int64_t RunStats::collection_total() const {
  std::int64_t s = 0;
  for (const RoundStats& r : rounds) s += r.collection;
  return s;
}

double RunStats::mean_congestion() const {
  if (rounds.empty()) return 0.0;
  double s = 0.0;
  for (const RoundStats& r : rounds) s += static_cast<double>(r.congestion);
  return s / static_cast<double>(rounds.size());
}

namespace {

struct PostRequest {
  std::int64_t cycle = 0;
  Payload payload;
};

/// Earliest the last result of a row can reach its buffer without any
/// congestion, given when each PE posted.
std::int64_t ideal_row_end(const MeshConfig& cfg, CollectionMode mode,
                           std::vector<std::pair<std::int64_t, int>> posts) {
  const std::int64_t kappa = cfg.pipeline_depth;
  if (mode == CollectionMode::Gather) {
    std::int64_t head = std::numeric_limits<std::int64_t>::min();
    for (auto [cycle, col] : posts) head = std::max(head, cycle + (cfg.cols - col) * kappa);
    return head + cfg.gather_len() - 1;
  }
  // Unicasts share the buffer link, one flit per cycle.
  std::vector<std::int64_t> arrivals;
  for (auto [cycle, col] : posts) arrivals.push_back(cycle + (cfg.cols - col) * kappa);
  std::sort(arrivals.begin(), arrivals.end());
  std::int64_t busy_until = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t a : arrivals) {
    const std::int64_t head = busy_until == std::numeric_limits<std::int64_t>::min()
                                  ? a
                                  : std::max(a, busy_until + 1);
    busy_until = head + cfg.unicast_packet_len - 1;
  }
  return busy_until;
}

RoundStats collect_round(Network& net, std::vector<PostRequest> posts, CollectionMode mode,
                         int round, std::int64_t max_cycles, RunStats& stats) {
  const MeshConfig& cfg = net.config();
  std::stable_sort(posts.begin(), posts.end(),
                   [](const PostRequest& a, const PostRequest& b) { return a.cycle < b.cycle; });

  std::map<NodeId, std::int32_t> expected;
  std::map<int, std::vector<std::pair<std::int64_t, int>>> row_posts;
  for (const PostRequest& p : posts) {
    expected.emplace(p.payload.origin, p.payload.value);
    row_posts[p.payload.origin.row].emplace_back(p.cycle, p.payload.origin.col);
  }
  std::map<NodeId, bool> seen;
  std::map<int, std::int64_t> row_end;

  auto absorb = [&](std::vector<DeliveredPacket> packets) {
    for (DeliveredPacket& pkt : packets) {
      ++stats.packets;
      stats.hops += static_cast<std::uint64_t>(pkt.hops);
      stats.flits += static_cast<std::uint64_t>(pkt.flits);
      if (pkt.type == PacketType::Gather) {
        const int bits = static_cast<int>(pkt.payloads.size()) * cfg.gather_payload_size;
        if (bits > cfg.gather_capacity_bits() || bits + pkt.aspace != cfg.gather_capacity_bits()) {
          throw ProtocolError("gather packet " + std::to_string(pkt.id) + " carries " +
                              std::to_string(bits) + " bits with aspace " +
                              std::to_string(pkt.aspace));
        }
      }
      for (const Payload& p : pkt.payloads) {
        auto it = expected.find(p.origin);
        if (p.round != round || it == expected.end()) {
          throw LostPayloadError("unexpected payload from " + to_string(p.origin) + " in round " +
                                 std::to_string(round));
        }
        if (seen[p.origin]) {
          throw LostPayloadError("payload from " + to_string(p.origin) + " delivered twice");
        }
        if (p.value != it->second) {
          throw OracleMismatchError("payload from " + to_string(p.origin) + " was altered in flight");
        }
        if (p.dst != cfg.buffer_node(p.origin.row) || pkt.dst != p.dst) {
          throw LostPayloadError("payload from " + to_string(p.origin) + " reached the wrong buffer");
        }
        seen[p.origin] = true;
        stats.delivered.push_back(DeliveredResult{round, p.origin, p.value});
        auto& end = row_end[p.origin.row];
        end = std::max(end, pkt.tail_cycle);
      }
    }
  };

  size_t next = 0;
  if (!posts.empty() && net.idle()) net.advance_to(posts.front().cycle);
  const std::int64_t begin = net.now();
  while (next < posts.size() || !net.idle()) {
    while (next < posts.size() && posts[next].cycle <= net.now()) {
      const Payload& p = posts[next].payload;
      if (mode == CollectionMode::RepetitiveUnicast) {
        net.send_unicast(p.origin, p, 0);
      } else {
        // Nothing upstream of the leftmost column: it starts the row's packet.
        net.post_payload(p.origin, p, p.origin.col == 0 ? 0 : cfg.delta_at(p.origin));
      }
      ++next;
    }
    if (next < posts.size() && net.idle()) {
      net.advance_to(posts[next].cycle);
      continue;
    }
    net.step();
    absorb(net.take_delivered());
    if (net.now() - begin > max_cycles) {
      throw DrainError("round " + std::to_string(round) + " did not drain within " +
                       std::to_string(max_cycles) + " cycles");
    }
  }
  if (seen.size() != expected.size()) {
    for (const auto& [origin, value] : expected) {
      if (!seen.count(origin)) {
        throw LostPayloadError("payload from " + to_string(origin) + " never reached the buffer");
      }
    }
  }

  RoundStats rs;
  std::int64_t latest_first_post = std::numeric_limits<std::int64_t>::min();
  std::int64_t latest_ideal = std::numeric_limits<std::int64_t>::min();
  for (auto& [row, list] : row_posts) {
    std::int64_t first = list.front().first;
    for (auto& e : list) first = std::min(first, e.first);
    latest_first_post = std::max(latest_first_post, first);
    latest_ideal = std::max(latest_ideal, ideal_row_end(cfg, mode, list));
    rs.end = std::max(rs.end, row_end[row]);
  }
  if (!row_posts.empty()) {
    rs.collection = rs.end - latest_first_post;
    rs.congestion = rs.end - latest_ideal;
  }
  return rs;
}

void attach_log(Network& net, std::ostream* log) {
  if (!log) return;
  net.set_event_sink([log](std::int64_t cycle, NodeId n, std::string_view kind) {
    *log << cycle << ' ' << to_string(n) << ' ' << kind << '\n';
  });
}

void finish(RunStats& stats, const Network& net, const ActivityCounters& streaming,
            const EnergyCoefficients& energy) {
  stats.gather = net.gather_counters();
  stats.flits_injected = net.flits_injected();
  stats.flits_ejected = net.flits_ejected();
  if (stats.flits_injected != stats.flits_ejected || !net.idle()) {
    throw DrainError("network not drained: " + std::to_string(stats.flits_injected) +
                     " flits injected, " + std::to_string(stats.flits_ejected) + " ejected");
  }
  stats.activity = net.activity();
  stats.activity += streaming;
  stats.energy = total_energy(stats.activity, energy);
  std::sort(stats.delivered.begin(), stats.delivered.end());
}

}  // namespace

RunStats run_convolution(const LayerConfig& layer, const MeshConfig& mesh, CollectionMode mode,
                         const RunOptions& options, const EnergyCoefficients& energy) {
  mesh.validate();
  if (layer.inputs <= 0 || layer.kernels <= 0 || stream_length(layer) <= 0) {
    throw ConfigError("layer dimensions must be positive");
  }
  RunStats stats;
  stats.model = layer.model;
  stats.layer = layer.layer;
  stats.rows = mesh.rows;
  stats.cols = mesh.cols;
  stats.mode = mode;

  const OperandSet operands = OperandSet::generate(layer, options.seed);
  Network net(mesh, SimOptions{options.stall_prob, options.seed, 100000});
  attach_log(net, options.event_log);
  std::mt19937_64 jitter_rng(options.seed ^ 0xA5A5A5A5DEADBEEFULL);
  std::uniform_int_distribution<int> jitter(0, std::max(0, options.post_jitter));

  ActivityCounters streaming;
  std::uint64_t initiators = 0;
  std::int64_t start = 0;
  const std::int64_t rounds = round_count(layer, mesh);
  for (std::int64_t round = 0; round < rounds; ++round) {
    const RoundSchedule schedule = make_schedule(layer, mesh, round);
    const StreamResult streamed = stream_round(schedule, mesh, operands, start);

    std::vector<PostRequest> posts;
    for (const PostEvent& e : streamed.posts) {
      const PEState& pe = streamed.pes[static_cast<size_t>(mesh.index(e.pe))];
      const auto in = operands.input(schedule.row_inputs[static_cast<size_t>(e.pe.row)]);
      const auto w = operands.filter(schedule.col_filters[static_cast<size_t>(e.pe.col)]);
      if (pe.received_count != schedule.stream_length || pe.accumulator != partial_conv_oracle(in, w)) {
        throw OracleMismatchError("PE " + to_string(e.pe) + " round " + std::to_string(round) +
                                  " accumulated " + std::to_string(pe.accumulator));
      }
      ++stats.oracle_checks;
      if (pe.accumulator > std::numeric_limits<std::int32_t>::max() ||
          pe.accumulator < std::numeric_limits<std::int32_t>::min()) {
        throw OracleMismatchError("PE " + to_string(e.pe) + " result overflows a 32-bit payload");
      }
      if (options.event_log) *options.event_log << e.last_operand_cycle << ' ' << to_string(e.pe) << " last_operand\n";
      if (e.pe.col == 0) ++initiators;
      const Payload p{e.pe, static_cast<std::int32_t>(pe.accumulator), mesh.buffer_node(e.pe.row),
                      static_cast<int>(round)};
      posts.push_back(PostRequest{e.cycle + (options.post_jitter > 0 ? jitter(jitter_rng) : 0), p});
    }

    // Operands visit every PE of an active row and of an active column.
    int active_rows = 0;
    int active_cols = 0;
    for (auto i : schedule.row_inputs) active_rows += i >= 0;
    for (auto k : schedule.col_filters) active_cols += k >= 0;
    const std::uint64_t visits = static_cast<std::uint64_t>(schedule.stream_length) *
                                 static_cast<std::uint64_t>(active_rows * mesh.cols + active_cols * mesh.rows);
    record(streaming, Activity::BufferWrite, visits);
    record(streaming, Activity::BufferRead, visits);
    record(streaming, Activity::XbarTraversal, visits);
    record(streaming, Activity::LinkTraversal, visits);

    RoundStats rs = collect_round(net, std::move(posts), mode, static_cast<int>(round),
                                  options.max_round_cycles, stats);
    rs.start = start;
    stats.rounds.push_back(rs);
    start = rs.end;
  }
  stats.total_cycles = start;
  finish(stats, net, streaming, energy);
  if (mode == CollectionMode::Gather) stats.timeouts = stats.gather.initiated - initiators;
  return stats;
}

RunStats run_row_collection(const MeshConfig& mesh, int row, CollectionMode mode,
                            const RunOptions& options) {
  mesh.validate();
  if (row < 0 || row >= mesh.rows) throw ConfigError("row outside the mesh");
  RunStats stats;
  stats.model = "row";
  stats.layer = "row" + std::to_string(row);
  stats.rows = mesh.rows;
  stats.cols = mesh.cols;
  stats.mode = mode;

  Network net(mesh, SimOptions{options.stall_prob, options.seed, 100000});
  attach_log(net, options.event_log);
  std::vector<PostRequest> posts;
  for (int c = 0; c < mesh.cols; ++c) {
    const NodeId n{row, c};
    posts.push_back(PostRequest{static_cast<std::int64_t>(c) * mesh.stream_hop(),
                                Payload{n, c + 1, mesh.buffer_node(row), 0}});
  }
  RoundStats rs = collect_round(net, std::move(posts), mode, 0, options.max_round_cycles, stats);
  stats.rounds.push_back(rs);
  stats.total_cycles = rs.end;
  finish(stats, net, ActivityCounters{}, EnergyCoefficients{});
  if (mode == CollectionMode::Gather) stats.timeouts = stats.gather.initiated - 1;
  return stats;
}

}  // namespace gnoc
