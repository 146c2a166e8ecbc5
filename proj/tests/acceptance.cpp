// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gnoc/analytic.hpp"
#include "gnoc/harness.hpp"
#include "gnoc/network.hpp"
#include "gnoc/systolic.hpp"

using namespace gnoc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const std::vector<std::string> kAlexnet = {"conv1", "conv2", "conv3", "conv4", "conv5"};

/// Simulated comparison for every built-in layer on both meshes, P = 64.
const Report& scaling_report() {
  static const Report report = [] {
    RunConfig c;
    c.set("mesh", "8,16");
    c.set("layers", "alexnet:*,vgg16:*");
    c.set("inputs", "64");
    return run(c);
  }();
  return report;
}

const LayerResult& find(const Report& r, const std::string& model, const std::string& layer, int mesh) {
  for (const LayerResult& x : r.results) {
    if (x.layer.model == model && x.layer.layer == layer && x.mesh == mesh) return x;
  }
  throw std::runtime_error("missing result " + model + ":" + layer);
}

Outcome table2_estimated() {
  Outcome o;
  const std::vector<std::string> expected = {"2.92", "0.73", "0.68", "0.34", "0.51"};
  for (size_t i = 0; i < kAlexnet.size(); ++i) {
    AnalyticParams p = AnalyticParams::from(load_layer("alexnet", kAlexnet[i]), MeshConfig{});
    p.kappa = 5;
    p.unicast_flits = 2;
    p.gather_flits = 4;
    p.eta = 8;
    p.t_mac = 5;
    p.t_delta = p.delta_ru = p.delta_gather = 0;
    const std::string got = fmt(percent_rounded(improvement(p)));
    o.detail += (i ? " " : "") + got;
    if (got != expected[i]) o.fail(kAlexnet[i] + " estimated " + got + " != " + expected[i]);
  }
  return o;
}

Outcome fig1_hops() {
  Outcome o;
  const MeshConfig m = MeshConfig::square(6);
  const auto ru = run_row_collection(m, 2, CollectionMode::RepetitiveUnicast).hops;
  const auto g = run_row_collection(m, 2, CollectionMode::Gather).hops;
  o.detail = "ru " + std::to_string(ru) + " hops, gather " + std::to_string(g) + " hops";
  if (ru != 15 || g != 5) o.fail(o.detail + " (want 15 / 5)");
  return o;
}

Outcome simulated_vs_estimated() {
  Outcome o;
  const Report& r = scaling_report();
  for (const std::string& l : kAlexnet) {
    const LayerResult& x = find(r, "alexnet", l, 8);
    const double est = *x.comparison.estimated_pct;
    const double sim = *x.comparison.simulated_pct;
    o.detail += (o.detail.empty() ? "" : " ") + l + " " + fmt(sim) + "/" + fmt(est);
    if (sim < est || sim > 3.0 * est) {
      o.fail(l + " simulated " + fmt(sim, 4) + " outside [" + fmt(est, 4) + ", " + fmt(3 * est, 4) + "]");
    }
  }
  if (o.pass) o.detail = "sim/est %: " + o.detail;
  return o;
}

Outcome mesh_scaling() {
  Outcome o;
  const Report& r = scaling_report();
  int layers = 0;
  const LayerDatabase db = LayerDatabase::builtin();
  for (const LayerConfig& l : db.layers()) {
    const LayerResult& small = find(r, l.model, l.layer, 8);
    const LayerResult& large = find(r, l.model, l.layer, 16);
    ++layers;
    if (!(*large.comparison.simulated_pct > *small.comparison.simulated_pct)) {
      o.fail(l.model + ":" + l.layer + " latency 16x16 " + fmt(*large.comparison.simulated_pct, 4) +
             " <= 8x8 " + fmt(*small.comparison.simulated_pct, 4));
    }
    if (!(*large.comparison.energy_pct > *small.comparison.energy_pct)) {
      o.fail(l.model + ":" + l.layer + " energy 16x16 " + fmt(*large.comparison.energy_pct, 4) +
             " <= 8x8 " + fmt(*small.comparison.energy_pct, 4));
    }
  }
  if (o.pass) o.detail = std::to_string(layers) + " layers, latency and energy improve more at 16x16";
  return o;
}

Outcome conv1_dominance() {
  Outcome o;
  const Report& r = scaling_report();
  for (int mesh : {8, 16}) {
    const double c1 = *find(r, "alexnet", "conv1", mesh).comparison.simulated_pct;
    for (const std::string& l : kAlexnet) {
      if (l == "conv1") continue;
      const double other = *find(r, "alexnet", l, mesh).comparison.simulated_pct;
      if (!(c1 > other)) o.fail(std::to_string(mesh) + "x" + std::to_string(mesh) + " " + l + " " +
                                fmt(other, 4) + " >= conv1 " + fmt(c1, 4));
    }
    o.detail += (o.detail.empty() ? "conv1 " : ", ") + fmt(c1) + "% at " + std::to_string(mesh) + "x" +
                std::to_string(mesh);
  }
  return o;
}

LayerConfig random_layer(std::mt19937_64& rng, int max_inputs, int max_kernels) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  LayerConfig l;
  l.model = "random";
  l.layer = "layer";
  l.channels = pick(1, 8);
  l.kernel_side = pick(1, 3);
  l.kernels = pick(1, max_kernels);
  l.side = 1;
  l.inputs = pick(1, max_inputs);
  return l;
}

/// Every result of every round, computed straight from the operands.
std::vector<DeliveredResult> brute_force(const LayerConfig& l, const MeshConfig& m, std::uint64_t seed) {
  const OperandSet ops = OperandSet::generate(l, seed);
  const std::int64_t filter_groups = (l.kernels + m.cols - 1) / m.cols;
  std::vector<DeliveredResult> out;
  for (std::int64_t i = 0; i < l.inputs; ++i) {
    for (std::int64_t k = 0; k < l.kernels; ++k) {
      const auto in = ops.input(i);
      const auto w = ops.filter(k);
      std::int64_t sum = 0;
      for (std::int64_t j = 0; j < l.channels * l.kernel_side * l.kernel_side; ++j) {
        sum += static_cast<std::int64_t>(in[static_cast<size_t>(j)]) * w[static_cast<size_t>(j)];
      }
      const int round = static_cast<int>((i / m.rows) * filter_groups + k / m.cols);
      out.push_back({round, NodeId{static_cast<int>(i % m.rows), static_cast<int>(k % m.cols)},
                     static_cast<std::int32_t>(sum)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome functional_oracle() {
  Outcome o;
  std::uint64_t checks = 0;
  int runs = 0;
  for (int n : {4, 8}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(n));
      const LayerConfig l = random_layer(rng, 3 * n, 2 * n + 3);
      const MeshConfig m = MeshConfig::square(n);
      const auto want = brute_force(l, m, seed);
      RunOptions opt;
      opt.seed = seed;
      opt.stall_prob = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
      for (auto mode : {CollectionMode::RepetitiveUnicast, CollectionMode::Gather}) {
        ++runs;
        try {
          const RunStats s = run_convolution(l, m, mode, opt);
          checks += s.oracle_checks;
          if (s.delivered != want) {
            o.fail("seed " + std::to_string(seed) + " " + std::to_string(n) + "x" + std::to_string(n) +
                   " " + mode_name(mode) + ": delivered results differ from brute force");
          }
        } catch (const std::exception& e) {
          o.fail("seed " + std::to_string(seed) + " " + mode_name(mode) + ": " + e.what());
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " runs, " + std::to_string(checks) + " PE results match";
  return o;
}

Outcome protocol_safety() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  int timeouts = 0;
  std::uint64_t flits = 0;
  for (int scenario = 0; scenario < 500; ++scenario) {
    MeshConfig m = MeshConfig::square(4);
    std::uniform_int_distribution<int> delta(0, 10);
    m.delta_per_node.resize(16);
    for (int& d : m.delta_per_node) d = delta(rng);
    const LayerConfig l = random_layer(rng, 10, 10);
    RunOptions opt;
    opt.seed = rng();
    opt.stall_prob = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    opt.post_jitter = std::uniform_int_distribution<int>(0, 10)(rng);
    const auto mode = rng() % 2 ? CollectionMode::Gather : CollectionMode::RepetitiveUnicast;
    try {
      const RunStats s = run_convolution(l, m, mode, opt);
      // The run itself throws on loss, duplication, interleaving, ASpace
      // overflow or a network that does not drain; recheck the totals here.
      if (s.delivered.size() != static_cast<size_t>(l.inputs * l.kernels)) {
        o.fail("scenario " + std::to_string(scenario) + ": payload count mismatch");
      }
      if (s.flits_injected != s.flits_ejected) {
        o.fail("scenario " + std::to_string(scenario) + ": flits injected != ejected");
      }
      if (s.delivered != brute_force(l, m, opt.seed)) {
        o.fail("scenario " + std::to_string(scenario) + ": delivered values differ");
      }
      timeouts += static_cast<int>(s.timeouts);
      flits += s.flits_ejected;
    } catch (const std::exception& e) {
      o.fail("scenario " + std::to_string(scenario) + " (" + mode_name(mode) + "): " + e.what());
    }
  }
  if (o.pass) {
    o.detail = "500 scenarios, " + std::to_string(flits) + " flits, " + std::to_string(timeouts) +
               " delta timeouts exercised";
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path();
  for (const char* format : {"csv", "json"}) {
    std::vector<std::string> files;
    for (int attempt = 0; attempt < 2; ++attempt) {
      RunConfig c;
      c.set("mesh", "4,8");
      c.set("layers", "alexnet:conv1,alexnet:conv5");
      c.set("inputs", "16");
      c.set("stall_prob", "0.1");
      c.set("seed", "1234");
      c.set("format", format);
      c.output = (dir / ("gnoc_acceptance_" + std::to_string(attempt) + "." + format)).string();
      emit(run(c), c, std::cout);
      files.push_back(slurp(c.output));
      std::filesystem::remove(c.output);
    }
    if (files[0] != files[1] || files[0].empty()) o.fail(std::string(format) + " outputs differ");
    o.detail += (o.detail.empty() ? "" : ", ") + std::string(format) + " " + std::to_string(files[0].size()) + " bytes";
  }
  if (o.pass) o.detail = "identical: " + o.detail;
  return o;
}

Outcome head_latency() {
  Outcome o;
  for (int kappa : {3, 5}) {
    for (int h = 1; h <= 7; ++h) {
      MeshConfig m = MeshConfig::square(8);
      m.rows = 1;
      m.pipeline_depth = kappa;
      Network net(m);
      const NodeId src{0, 7 - h};
      net.send_unicast(src, Payload{src, 1, m.buffer_node(0), 0});
      std::vector<DeliveredPacket> got;
      while (!net.idle()) {
        net.step();
        for (auto& p : net.take_delivered()) got.push_back(p);
      }
      if (got.size() != 1 || got[0].dst_arrival - got[0].inject_cycle != static_cast<std::int64_t>(h) * kappa) {
        o.fail("kappa " + std::to_string(kappa) + " h " + std::to_string(h));
      }
    }
  }
  if (o.pass) o.detail = "h*kappa for h in 1..7, kappa in {3,5}";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 estimated improvement per AlexNet layer", table2_estimated},
      {"AC2 hop count of one 6x6 row", fig1_hops},
      {"AC3 simulated within [estimated, 3x estimated] at 8x8", simulated_vs_estimated},
      {"AC4 16x16 improves more than 8x8", mesh_scaling},
      {"AC5 conv1 has the largest simulated improvement", conv1_dominance},
      {"AC6 functional oracle, 50 seeds on 4x4 and 8x8", functional_oracle},
      {"AC7 protocol safety, 500 random 4x4 scenarios", protocol_safety},
      {"AC8 byte-identical outputs", determinism},
      {"AC9 uncontended head latency", head_latency},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("aborted: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
