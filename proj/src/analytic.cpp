#include "gnoc/analytic.hpp"

#include <cmath>

namespace gnoc {

namespace {
std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }
}  // namespace

AnalyticParams AnalyticParams::from(const LayerConfig& layer, const MeshConfig& mesh) {
  AnalyticParams p;
  p.rows = mesh.rows;
  p.cols = mesh.cols;
  p.channels = layer.channels;
  p.kernel_side = layer.kernel_side;
  p.inputs = layer.inputs;
  p.kernels = layer.kernels;
  p.t_mac = mesh.t_mac;
  p.kappa = mesh.pipeline_depth;
  p.unicast_flits = mesh.unicast_packet_len;
  p.gather_flits = mesh.gather_len();
  p.eta = mesh.eta();
  return p;
}

std::int64_t AnalyticParams::rounds() const {
  return ceil_div(inputs, rows) * ceil_div(kernels, cols);
}

std::int64_t collection_ru(const AnalyticParams& p) {
  return static_cast<std::int64_t>(p.cols) * (p.kappa + p.unicast_flits) - 1 + p.delta_ru;
}

std::int64_t collection_gather(const AnalyticParams& p) {
  const std::int64_t packets = ceil_div(p.cols, p.eta);
  std::int64_t sum = 0;
  for (std::int64_t i = 0; i < packets; ++i) {
    sum += (p.cols - i * p.eta) * p.kappa + p.gather_flits - 1 + p.t_delta + p.delta_gather;
  }
  return sum;
}

std::int64_t latency_ru(const AnalyticParams& p) {
  return (p.stream() + p.t_mac + collection_ru(p)) * p.rounds();
}

std::int64_t latency_gather(const AnalyticParams& p) {
  return (p.stream() + p.t_mac + collection_gather(p)) * p.rounds();
}

double improvement(const AnalyticParams& p) {
  const double ru = static_cast<double>(collection_ru(p));
  const double g = static_cast<double>(collection_gather(p));
  return (ru - g) / (static_cast<double>(p.stream() + p.t_mac) + g);
}

double percent_rounded(double fraction, int digits) {
  const double scale = std::pow(10.0, digits);
  // The epsilon keeps exact halves like 0.125 from landing just below.
  return std::floor(fraction * 100.0 * scale + 0.5 + 1e-9) / scale;
}

}  // namespace gnoc
