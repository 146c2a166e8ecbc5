#include "gnoc/workload.hpp"

#include <fstream>
#include <sstream>

namespace gnoc {

namespace {

// Mirrors data/layers.txt; test_workload checks the two stay identical.
constexpr std::string_view kBuiltinLayers = R"(alexnet conv1 3 64 11 55
alexnet conv2 64 192 5 27
alexnet conv3 192 384 3 13
alexnet conv4 384 256 3 13
alexnet conv5 256 256 3 13
vgg16 conv1 64 64 3 224
vgg16 conv2 128 128 3 112
vgg16 conv3 256 256 3 56
vgg16 conv4 512 512 3 14
)";

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

std::int64_t stream_length(const LayerConfig& layer) {
  return static_cast<std::int64_t>(layer.channels) * layer.kernel_side * layer.kernel_side;
}

std::int64_t round_count(const LayerConfig& layer, const MeshConfig& mesh) {
  return ceil_div(layer.inputs, mesh.rows) * ceil_div(layer.kernels, mesh.cols);
}

LayerDatabase LayerDatabase::builtin() { return parse(kBuiltinLayers); }

LayerDatabase LayerDatabase::parse(std::string_view text) {
  LayerDatabase db;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    LayerConfig l;
    if (!(fields >> l.model)) continue;
    if (!(fields >> l.layer >> l.channels >> l.kernels >> l.kernel_side >> l.side)) {
      throw std::invalid_argument("layer database line " + std::to_string(lineno) +
                                  ": expected 'model layer C Q R H'");
    }
    std::string extra;
    if (fields >> extra) {
      throw std::invalid_argument("layer database line " + std::to_string(lineno) +
                                  ": trailing field '" + extra + "'");
    }
    if (l.channels <= 0 || l.kernels <= 0 || l.kernel_side <= 0 || l.side <= 0) {
      throw std::invalid_argument("layer database line " + std::to_string(lineno) +
                                  ": fields must be positive");
    }
    l.inputs = static_cast<std::int64_t>(l.side) * l.side;
    db.layers_.push_back(std::move(l));
  }
  return db;
}

LayerDatabase LayerDatabase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open layer database " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string LayerDatabase::to_text() const {
  std::ostringstream out;
  for (const LayerConfig& l : layers_) {
    out << l.model << ' ' << l.layer << ' ' << l.channels << ' ' << l.kernels << ' '
        << l.kernel_side << ' ' << l.side << '\n';
  }
  return out.str();
}

const LayerConfig& LayerDatabase::find(std::string_view model, std::string_view layer) const {
  for (const LayerConfig& l : layers_) {
    if (l.model == model && l.layer == layer) return l;
  }
  throw UnknownLayerError("unknown layer " + std::string(model) + ":" + std::string(layer));
}

std::vector<LayerConfig> LayerDatabase::model(std::string_view model) const {
  std::vector<LayerConfig> out;
  for (const LayerConfig& l : layers_) {
    if (l.model == model) out.push_back(l);
  }
  if (out.empty()) throw UnknownLayerError("unknown model " + std::string(model));
  return out;
}

LayerConfig load_layer(std::string_view model, std::string_view layer) {
  static const LayerDatabase db = LayerDatabase::builtin();
  return db.find(model, layer);
}

}  // namespace gnoc
