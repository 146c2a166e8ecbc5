// Command-line driver: batch runs, the estimated-vs-simulated table and the
// single-row hop demo.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gnoc/harness.hpp"
#include "gnoc/network.hpp"

using namespace gnoc;

namespace {

struct Overrides {
  std::string mesh;
  std::string layers;
  std::string modes;
  std::string format;
  std::string output;
  std::string event_log;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> inputs;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mesh", o.mesh, "Mesh sizes, e.g. 8,16");
  cmd->add_option("--layers", o.layers, "Layer list, e.g. alexnet:conv1,vgg16:*");
  cmd->add_option("--modes", o.modes, "Subset of ru,gather,analytic");
  cmd->add_option("--seed", o.seed, "Operand and stall seed");
  cmd->add_option("--inputs", o.inputs, "Override P, the number of input vectors");
  cmd->add_option("--format", o.format, "csv or json");
  cmd->add_option("-o,--output", o.output, "Result file (default stdout)");
  cmd->add_option("--event-log", o.event_log, "Write per-cycle gather events here");
  cmd->add_option("--jobs", o.jobs, "Simulations run in parallel");
  cmd->add_option("--set", o.sets, "Any config key as key=value (repeatable)");
}

void apply(RunConfig& c, const Overrides& o) {
  if (!o.mesh.empty()) c.set("mesh", o.mesh);
  if (!o.layers.empty()) c.set("layers", o.layers);
  if (!o.modes.empty()) c.set("modes", o.modes);
  if (!o.format.empty()) c.set("format", o.format);
  if (!o.output.empty()) c.output = o.output;
  if (!o.event_log.empty()) c.event_log = o.event_log;
  if (o.seed) c.seed = *o.seed;
  if (o.inputs) c.inputs = *o.inputs;
  if (o.jobs) c.jobs = *o.jobs;
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh NoC simulator with gather packets for CNN result collection"};
  app.require_subcommand(1);

  Overrides run_opts;
  std::string config_path;
  bool show_table = false;
  auto* run_cmd = app.add_subcommand("run", "Run a config file (flags override its keys)");
  run_cmd->add_option("config", config_path, "key = value config file");
  run_cmd->add_flag("--table", show_table, "Also print the comparison table to stderr");
  add_common(run_cmd, run_opts);

  Overrides t2_opts;
  bool simulate = false;
  auto* t2_cmd = app.add_subcommand("table2", "Estimated (and optionally simulated) improvement per AlexNet layer");
  t2_cmd->add_flag("--simulate", simulate, "Run both collection schemes too");
  add_common(t2_cmd, t2_opts);

  int size = 6;
  int row = 2;
  std::string fig_format = "csv";
  auto* fig_cmd = app.add_subcommand("fig1", "One ready row sending to its buffer: hop counts per scheme");
  fig_cmd->add_option("--size", size, "Mesh side");
  fig_cmd->add_option("--row", row, "Row that sends");
  fig_cmd->add_option("--format", fig_format, "csv or json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
      apply(config, run_opts);
      const Report report = run(config);
      emit(report, config, std::cout);
      if (show_table) std::cerr << comparison_table(report);
    } else if (*t2_cmd) {
      RunConfig config;
      config.set("layers", "alexnet:*");
      config.set("modes", simulate ? "ru,gather,analytic" : "analytic");
      apply(config, t2_opts);
      const Report report = run(config);
      std::cout << comparison_table(report);
      if (!config.output.empty()) emit(report, config, std::cout);
    } else if (*fig_cmd) {
      const MeshConfig mesh = MeshConfig::square(size);
      Report report;
      LayerResult r;
      r.layer.model = "row";
      r.layer.layer = "row" + std::to_string(row);
      r.mesh = size;
      r.ru = run_row_collection(mesh, row, CollectionMode::RepetitiveUnicast);
      r.gather = run_row_collection(mesh, row, CollectionMode::Gather);
      r.comparison.simulated_pct =
          relative_improvement(static_cast<double>(r.ru->total_cycles),
                               static_cast<double>(r.gather->total_cycles)) * 100.0;
      r.comparison.energy_pct = relative_improvement(r.ru->energy, r.gather->energy) * 100.0;
      report.results.push_back(std::move(r));
      std::cout << (fig_format == "json" ? to_json(report) : to_csv(report));
    }
  } catch (const SimulationError& e) {
    std::cerr << "simulation aborted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
