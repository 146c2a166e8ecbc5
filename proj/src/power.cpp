#include "gnoc/power.hpp"

namespace gnoc {

std::string_view activity_name(Activity a) {
  switch (a) {
    case Activity::BufferWrite: return "buffer_write";
    case Activity::BufferRead: return "buffer_read";
    case Activity::XbarTraversal: return "xbar_traversal";
    case Activity::LinkTraversal: return "link_traversal";
    case Activity::VcArbitration: return "va_arb";
    case Activity::SwArbitration: return "sa_arb";
    case Activity::PayloadUpload: return "payload_upload";
  }
  return "?";
}

double total_energy(const ActivityCounters& c, const EnergyCoefficients& k) {
  double e = 0.0;
  for (size_t i = 0; i < c.counts.size(); ++i) {
    e += static_cast<double>(c.counts[i]) * k.per_event[i];
  }
  return e;
}

double relative_improvement(double baseline, double candidate) {
  if (baseline == 0.0) return 0.0;
  return (baseline - candidate) / baseline;
}

}  // namespace gnoc
