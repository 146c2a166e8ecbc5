#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gnoc/mesh.hpp"

namespace gnoc {

class UnknownLayerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LayerConfig {
  std::string model;
  std::string layer;
  int channels = 1;        // C
  int kernels = 1;         // Q
  int kernel_side = 1;     // R
  int side = 1;            // H, output feature-map side
  std::int64_t inputs = 1; // P, im2col input vectors

  friend bool operator==(const LayerConfig&, const LayerConfig&) = default;

  /// Copy with P replaced, e.g. truncated for desk-scale runs.
  LayerConfig with_inputs(std::int64_t p) const {
    LayerConfig c = *this;
    c.inputs = p;
    return c;
  }
};

/// Operands each PE receives per round: C * R * R.
std::int64_t stream_length(const LayerConfig& layer);

/// ceil(P / N) * ceil(Q / M).
std::int64_t round_count(const LayerConfig& layer, const MeshConfig& mesh);

/// Table of convolution layers, loadable from the text format in
/// data/layers.txt ("model layer C Q R H" per line, '#' comments).
class LayerDatabase {
 public:
  static LayerDatabase builtin();
  static LayerDatabase parse(std::string_view text);
  static LayerDatabase load(const std::filesystem::path& path);

  std::string to_text() const;

  const LayerConfig& find(std::string_view model, std::string_view layer) const;
  std::vector<LayerConfig> model(std::string_view model) const;
  const std::vector<LayerConfig>& layers() const { return layers_; }

 private:
  std::vector<LayerConfig> layers_;
};

/// Lookup in the built-in database. Throws UnknownLayerError.
LayerConfig load_layer(std::string_view model, std::string_view layer);

}  // namespace gnoc
