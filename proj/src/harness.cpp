#include "gnoc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace gnoc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) { return parse_number<int>(key, value); }

std::optional<Activity> activity_by_name(std::string_view name) {
  for (int i = 0; i < kActivityKinds; ++i) {
    if (activity_name(static_cast<Activity>(i)) == name) return static_cast<Activity>(i);
  }
  return std::nullopt;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string mesh_label(int n) { return std::to_string(n) + "x" + std::to_string(n); }

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "mesh") {
    mesh_sizes.clear();
    for (auto part : split(value, ',')) mesh_sizes.push_back(parse_int(key, part));
  } else if (key == "layers") {
    layers.clear();
    for (auto part : split(value, ',')) {
      const auto colon = part.find(':');
      if (colon == std::string_view::npos) {
        layers.push_back({std::string(part), "*"});
      } else {
        layers.push_back({std::string(trim(part.substr(0, colon))),
                          std::string(trim(part.substr(colon + 1)))});
      }
    }
  } else if (key == "modes") {
    ru = gather = analytic = false;
    for (auto part : split(value, ',')) {
      if (part == "ru") ru = true;
      else if (part == "gather") gather = true;
      else if (part == "analytic") analytic = true;
      else throw ConfigError("unknown mode '" + std::string(part) + "'");
    }
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "inputs") {
    if (value.empty() || value == "all") inputs.reset();
    else inputs = parse_number<std::int64_t>(key, value);
  } else if (key == "stall_prob") {
    stall_prob = parse_number<double>(key, value);
  } else if (key == "format") {
    if (value == "csv") format = OutputFormat::Csv;
    else if (value == "json") format = OutputFormat::Json;
    else throw ConfigError("unknown format '" + std::string(value) + "'");
  } else if (key == "output") {
    output = value;
  } else if (key == "event_log") {
    event_log = value;
  } else if (key == "layer_db") {
    layer_db = value;
  } else if (key == "jobs") {
    jobs = parse_int(key, value);
  } else if (key == "vc_count") {
    mesh.vc_count = parse_int(key, value);
  } else if (key == "buffer_depth") {
    mesh.buffer_depth = parse_int(key, value);
  } else if (key == "flit_width") {
    mesh.flit_width = parse_int(key, value);
  } else if (key == "unicast_packet_len") {
    mesh.unicast_packet_len = parse_int(key, value);
  } else if (key == "gather_packet_len") {
    mesh.gather_packet_len = parse_int(key, value);
  } else if (key == "pipeline_depth" || key == "kappa") {
    mesh.pipeline_depth = parse_int(key, value);
  } else if (key == "delta") {
    mesh.delta = parse_int(key, value);
  } else if (key == "gather_payload_size") {
    mesh.gather_payload_size = parse_int(key, value);
  } else if (key == "gather_capacity" || key == "eta") {
    mesh.gather_capacity = parse_int(key, value);
  } else if (key == "t_mac") {
    mesh.t_mac = parse_int(key, value);
  } else if (key == "stream_hop_cycles") {
    mesh.stream_hop_cycles = parse_int(key, value);
  } else if (key.starts_with("delta.")) {
    const auto parts = split(key.substr(6), '.');
    if (parts.size() != 2) throw ConfigError("per-node delta key must be delta.<row>.<col>");
    node_deltas.push_back({parse_int(key, parts[0]), parse_int(key, parts[1]), parse_int(key, value)});
  } else if (key.starts_with("energy.")) {
    const auto kind = activity_by_name(key.substr(7));
    if (!kind) throw ConfigError("unknown activity in '" + std::string(key) + "'");
    energy[*kind] = parse_number<double>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  if (!ru && !gather && !analytic) throw ConfigError("at least one mode is required");
  if (mesh_sizes.empty()) throw ConfigError("at least one mesh size is required");
  if (layers.empty()) throw ConfigError("at least one layer is required");
  if (inputs && *inputs <= 0) throw ConfigError("inputs must be positive");
  if (stall_prob < 0.0 || stall_prob >= 1.0) throw ConfigError("stall_prob must be in [0, 1)");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (const NodeDelta& d : node_deltas) {
    if (d.delta < 0) throw ConfigError("per-node delta must be non-negative");
  }
  for (int n : mesh_sizes) mesh_for(n).validate();
}

MeshConfig RunConfig::mesh_for(int n) const {
  MeshConfig m = mesh;
  m.rows = n;
  m.cols = n;
  m.delta_per_node.clear();
  if (!node_deltas.empty() && n > 0) {
    m.delta_per_node.assign(static_cast<size_t>(n * n), mesh.delta);
    for (const NodeDelta& d : node_deltas) {
      const NodeId id{d.row, d.col};
      if (m.contains(id)) m.delta_per_node[static_cast<size_t>(m.index(id))] = d.delta;
    }
  }
  return m;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  int lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    config.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<LayerConfig> select_layers(const RunConfig& config, const LayerDatabase& db) {
  std::vector<LayerConfig> out;
  for (const LayerSelector& s : config.layers) {
    if (s.layer == "*") {
      for (const LayerConfig& l : db.model(s.model)) out.push_back(l);
    } else {
      out.push_back(db.find(s.model, s.layer));
    }
  }
  if (config.inputs) {
    for (LayerConfig& l : out) l = l.with_inputs(*config.inputs);
  }
  return out;
}

Report run(const RunConfig& config) {
  config.validate();
  const LayerDatabase db = config.layer_db.empty() ? LayerDatabase::builtin()
                                                   : LayerDatabase::load(config.layer_db);
  const std::vector<LayerConfig> layers = select_layers(config, db);

  Report report;
  for (int n : config.mesh_sizes) {
    const MeshConfig mesh = config.mesh_for(n);
    for (const LayerConfig& layer : layers) {
      LayerResult r;
      r.layer = layer;
      r.mesh = n;
      r.params = AnalyticParams::from(layer, mesh);
      if (config.analytic) r.comparison.estimated_pct = improvement(r.params) * 100.0;
      report.results.push_back(std::move(r));
    }
  }

  struct Job {
    size_t result;
    CollectionMode mode;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < report.results.size(); ++i) {
    if (config.ru) jobs.push_back({i, CollectionMode::RepetitiveUnicast});
    if (config.gather) jobs.push_back({i, CollectionMode::Gather});
  }

  std::unique_ptr<std::ofstream> log;
  if (!config.event_log.empty()) {
    log = std::make_unique<std::ofstream>(config.event_log);
    if (!*log) throw ConfigError("cannot write event log " + config.event_log);
  }

  auto simulate = [&](const Job& job) {
    const LayerResult& r = report.results[job.result];
    RunOptions options;
    options.seed = config.seed;
    options.stall_prob = config.stall_prob;
    options.event_log = log.get();
    if (log) {
      *log << "# " << r.layer.model << ' ' << r.layer.layer << ' ' << mesh_label(r.mesh) << ' '
           << mode_name(job.mode) << '\n';
    }
    return run_convolution(r.layer, config.mesh_for(r.mesh), job.mode, options, config.energy);
  };

  std::vector<RunStats> stats(jobs.size());
  // A shared event log forces serial execution to keep it ordered.
  const size_t width = log ? 1 : static_cast<size_t>(config.jobs);
  for (size_t begin = 0; begin < jobs.size(); begin += width) {
    const size_t end = std::min(jobs.size(), begin + width);
    if (end - begin == 1) {
      stats[begin] = simulate(jobs[begin]);
      continue;
    }
    std::vector<std::future<RunStats>> running;
    for (size_t j = begin; j < end; ++j) {
      running.push_back(std::async(std::launch::async, simulate, jobs[j]));
    }
    for (size_t j = begin; j < end; ++j) stats[j] = running[j - begin].get();
  }

  for (size_t j = 0; j < jobs.size(); ++j) {
    LayerResult& r = report.results[jobs[j].result];
    (jobs[j].mode == CollectionMode::Gather ? r.gather : r.ru) = std::move(stats[j]);
  }
  for (LayerResult& r : report.results) {
    if (r.ru && r.gather) {
      r.comparison.simulated_pct =
          relative_improvement(static_cast<double>(r.ru->total_cycles),
                               static_cast<double>(r.gather->total_cycles)) * 100.0;
      r.comparison.energy_pct = relative_improvement(r.ru->energy, r.gather->energy) * 100.0;
    }
  }
  return report;
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  out << "model,layer,mesh,mode,total_cycles,collection_cycles,hops,flits,energy,improvement_pct\n";
  for (const LayerResult& r : report.results) {
    const std::string prefix = r.layer.model + ',' + r.layer.layer + ',' + mesh_label(r.mesh) + ',';
    for (const auto* s : {&r.ru, &r.gather}) {
      if (!*s) continue;
      const RunStats& st = **s;
      out << prefix << mode_name(st.mode) << ',' << st.total_cycles << ',' << st.collection_total()
          << ',' << st.hops << ',' << st.flits << ',' << fixed(st.energy, 3) << ",\n";
    }
    if (r.ru && r.gather) {
      // Savings of gather over RU; the percentage is on total cycles.
      out << prefix << "improvement," << r.ru->total_cycles - r.gather->total_cycles << ','
          << r.ru->collection_total() - r.gather->collection_total() << ','
          << static_cast<std::int64_t>(r.ru->hops) - static_cast<std::int64_t>(r.gather->hops) << ','
          << static_cast<std::int64_t>(r.ru->flits) - static_cast<std::int64_t>(r.gather->flits) << ','
          << fixed(r.ru->energy - r.gather->energy, 3) << ',' << fixed(*r.comparison.simulated_pct, 4)
          << '\n';
    }
    if (r.comparison.estimated_pct) {
      out << prefix << "analytic," << latency_gather(r.params) << ','
          << collection_gather(r.params) * r.params.rounds() << ",,,,"
          << fixed(*r.comparison.estimated_pct, 4) << '\n';
    }
  }
  return out.str();
}

std::string to_json(const Report& report) {
  using nlohmann::ordered_json;
  ordered_json records = ordered_json::array();
  for (const LayerResult& r : report.results) {
    ordered_json base;
    base["model"] = r.layer.model;
    base["layer"] = r.layer.layer;
    base["mesh"] = mesh_label(r.mesh);
    for (const auto* s : {&r.ru, &r.gather}) {
      if (!*s) continue;
      const RunStats& st = **s;
      ordered_json rec = base;
      rec["mode"] = mode_name(st.mode);
      rec["total_cycles"] = st.total_cycles;
      rec["collection_cycles"] = st.collection_total();
      rec["hops"] = st.hops;
      rec["flits"] = st.flits;
      rec["energy"] = st.energy;
      rec["improvement_pct"] = nullptr;
      rec["packets"] = st.packets;
      rec["timeouts"] = st.timeouts;
      rec["oracle_checks"] = st.oracle_checks;
      rec["mean_congestion"] = st.mean_congestion();
      ordered_json activity;
      for (int k = 0; k < kActivityKinds; ++k) {
        activity[std::string(activity_name(static_cast<Activity>(k)))] =
            st.activity.counts[static_cast<size_t>(k)];
      }
      rec["activity"] = activity;
      ordered_json rounds = ordered_json::array();
      for (const RoundStats& rs : st.rounds) {
        rounds.push_back({{"start", rs.start},
                          {"end", rs.end},
                          {"collection", rs.collection},
                          {"congestion", rs.congestion}});
      }
      rec["rounds"] = rounds;
      records.push_back(rec);
    }
    if (r.ru && r.gather) {
      ordered_json rec = base;
      rec["mode"] = "improvement";
      rec["total_cycles"] = r.ru->total_cycles - r.gather->total_cycles;
      rec["collection_cycles"] = r.ru->collection_total() - r.gather->collection_total();
      rec["hops"] = static_cast<std::int64_t>(r.ru->hops) - static_cast<std::int64_t>(r.gather->hops);
      rec["flits"] = static_cast<std::int64_t>(r.ru->flits) - static_cast<std::int64_t>(r.gather->flits);
      rec["energy"] = r.ru->energy - r.gather->energy;
      rec["improvement_pct"] = *r.comparison.simulated_pct;
      rec["energy_improvement_pct"] = *r.comparison.energy_pct;
      records.push_back(rec);
    }
    if (r.comparison.estimated_pct) {
      ordered_json rec = base;
      rec["mode"] = "analytic";
      rec["total_cycles"] = latency_gather(r.params);
      rec["collection_cycles"] = collection_gather(r.params) * r.params.rounds();
      rec["hops"] = nullptr;
      rec["flits"] = nullptr;
      rec["energy"] = nullptr;
      rec["improvement_pct"] = *r.comparison.estimated_pct;
      rec["ru_total_cycles"] = latency_ru(r.params);
      records.push_back(rec);
    }
  }
  return records.dump(2) + "\n";
}

std::string comparison_table(const Report& report) {
  // One block per (model, mesh), layers as columns.
  std::vector<std::pair<std::string, int>> groups;
  for (const LayerResult& r : report.results) {
    const std::pair<std::string, int> g{r.layer.model, r.mesh};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::ostringstream out;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& [model, mesh] = groups[gi];
    std::vector<const LayerResult*> cols;
    for (const LayerResult& r : report.results) {
      if (r.layer.model == model && r.mesh == mesh) cols.push_back(&r);
    }
    char cell[32];
    auto row = [&](const std::string& title, auto value) {
      std::snprintf(cell, sizeof cell, "%-16s", title.c_str());
      out << cell;
      for (const LayerResult* r : cols) {
        std::snprintf(cell, sizeof cell, "%9s", value(*r).c_str());
        out << cell;
      }
      out << '\n';
    };
    if (gi > 0) out << '\n';
    row(model + " " + mesh_label(mesh), [](const LayerResult& r) { return r.layer.layer; });
    if (cols.front()->comparison.estimated_pct) {
      row("Estimated (%)", [](const LayerResult& r) {
        return fixed(percent_rounded(*r.comparison.estimated_pct / 100.0), 2);
      });
    }
    if (cols.front()->comparison.simulated_pct) {
      row("Simulated (%)", [](const LayerResult& r) {
        return r.comparison.simulated_pct ? fixed(*r.comparison.simulated_pct, 2) : std::string("-");
      });
      row("Energy (%)", [](const LayerResult& r) {
        return r.comparison.energy_pct ? fixed(*r.comparison.energy_pct, 2) : std::string("-");
      });
    }
  }
  return out.str();
}

void emit(const Report& report, const RunConfig& config, std::ostream& stdout_stream) {
  const std::string text = config.format == OutputFormat::Json ? to_json(report) : to_csv(report);
  if (config.output.empty()) {
    stdout_stream << text;
    return;
  }
  std::ofstream out(config.output, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + config.output);
  out << text;
  if (!out.flush()) throw ConfigError("failed writing " + config.output);
}

}  // namespace gnoc
