#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gnoc {

/// Dynamic-energy events counted by the routers.
enum class Activity : int {
  BufferWrite = 0,
  BufferRead,
  XbarTraversal,
  LinkTraversal,
  VcArbitration,
  SwArbitration,
  PayloadUpload,
};

inline constexpr int kActivityKinds = 7;

std::string_view activity_name(Activity a);

struct ActivityCounters {
  std::array<std::uint64_t, kActivityKinds> counts{};

  std::uint64_t operator[](Activity a) const { return counts[static_cast<size_t>(a)]; }
  ActivityCounters& operator+=(const ActivityCounters& o) {
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
  }
};

inline void record(ActivityCounters& c, Activity kind, std::uint64_t n = 1) {
  c.counts[static_cast<size_t>(kind)] += n;
}

/// Per-event energy weights, abstract units. Unit weights by default.
struct EnergyCoefficients {
  std::array<double, kActivityKinds> per_event{1, 1, 1, 1, 1, 1, 1};

  double& operator[](Activity a) { return per_event[static_cast<size_t>(a)]; }
  double operator[](Activity a) const { return per_event[static_cast<size_t>(a)]; }
};

double total_energy(const ActivityCounters& c, const EnergyCoefficients& k);

/// (baseline - candidate) / baseline; 0 when the baseline is 0.
double relative_improvement(double baseline, double candidate);

}  // namespace gnoc
