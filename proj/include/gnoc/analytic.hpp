#pragma once

#include <cstdint>

#include "gnoc/mesh.hpp"
#include "gnoc/workload.hpp"

namespace gnoc {

/// Closed-form latency model of one collection scheme per round.
/// Packet sizes are already in flits (ceil(L/W), ceil(L'/W)).
struct AnalyticParams {
  int rows = 8;                // N
  int cols = 8;                // M
  std::int64_t channels = 1;   // C
  std::int64_t kernel_side = 1;// R
  std::int64_t inputs = 1;     // P
  std::int64_t kernels = 1;    // Q
  int t_mac = 5;
  int kappa = 5;
  int unicast_flits = 2;
  int gather_flits = 4;
  int eta = 8;
  int t_delta = 0;
  int delta_ru = 0;            // congestion, RU
  int delta_gather = 0;        // congestion, gather

  static AnalyticParams from(const LayerConfig& layer, const MeshConfig& mesh);

  std::int64_t stream() const { return channels * kernel_side * kernel_side; }
  std::int64_t rounds() const;
};

/// M(kappa + L) - 1 + Delta_R: the last of M serialized unicasts.
std::int64_t collection_ru(const AnalyticParams& p);
/// Sum over ceil(M/eta) gather packets of (M - i*eta)*kappa + L' - 1 + t_delta + Delta_G.
std::int64_t collection_gather(const AnalyticParams& p);

std::int64_t latency_ru(const AnalyticParams& p);
std::int64_t latency_gather(const AnalyticParams& p);

/// Per-round saving of gather over RU relative to one gather round.
double improvement(const AnalyticParams& p);

/// Percentage rounded half-up to `digits` decimals.
double percent_rounded(double fraction, int digits = 2);

}  // namespace gnoc
