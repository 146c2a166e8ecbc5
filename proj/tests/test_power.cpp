#include "doctest.h"
#include "gnoc/power.hpp"

using namespace gnoc;

TEST_CASE("no activity costs nothing") {
  CHECK(total_energy(ActivityCounters{}, EnergyCoefficients{}) == 0.0);
}

TEST_CASE("energy is linear in the counters") {
  ActivityCounters a;
  record(a, Activity::BufferWrite, 10);
  record(a, Activity::LinkTraversal, 4);
  EnergyCoefficients k;
  k[Activity::BufferWrite] = 0.5;
  k[Activity::LinkTraversal] = 2.0;
  CHECK(total_energy(a, k) == doctest::Approx(13.0));

  ActivityCounters twice = a;
  twice += a;
  CHECK(total_energy(twice, k) == doctest::Approx(2 * total_energy(a, k)));
}

TEST_CASE("relative improvement") {
  CHECK(relative_improvement(100.0, 90.0) == doctest::Approx(0.1));
  CHECK(relative_improvement(0.0, 5.0) == 0.0);
  CHECK(relative_improvement(50.0, 60.0) < 0.0);
}

TEST_CASE("activity names are distinct") {
  for (int i = 0; i < kActivityKinds; ++i) {
    for (int j = i + 1; j < kActivityKinds; ++j) {
      CHECK(activity_name(static_cast<Activity>(i)) != activity_name(static_cast<Activity>(j)));
    }
  }
}
