#include "doctest.h"
#include "gnoc/analytic.hpp"

using namespace gnoc;

namespace {

AnalyticParams conv1_8x8() {
  return AnalyticParams::from(load_layer("alexnet", "conv1").with_inputs(8), MeshConfig{});
}

}  // namespace

TEST_CASE("per-round latency terms") {
  AnalyticParams p = conv1_8x8();
  p.kernels = 8;
  CHECK(p.rounds() == 1);
  CHECK(collection_ru(p) == 55);
  CHECK(collection_gather(p) == 43);
  CHECK(latency_ru(p) == 363 + 5 + 55);
  CHECK(latency_gather(p) == 411);
}

TEST_CASE("estimated improvement per AlexNet layer") {
  const char* layers[] = {"conv1", "conv2", "conv3", "conv4", "conv5"};
  const double expected[] = {2.92, 0.73, 0.68, 0.34, 0.51};
  for (int i = 0; i < 5; ++i) {
    CAPTURE(layers[i]);
    const auto p = AnalyticParams::from(load_layer("alexnet", layers[i]), MeshConfig{});
    CHECK(percent_rounded(improvement(p)) == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("one payload per packet degenerates to serialized packets") {
  AnalyticParams p = conv1_8x8();
  p.eta = 1;
  std::int64_t sum = 0;
  for (int i = 0; i < 8; ++i) sum += (8 - i) * 5 + 4 - 1;
  CHECK(collection_gather(p) == sum);
}

TEST_CASE("timeouts add t_delta per packet") {
  AnalyticParams p = conv1_8x8();
  for (int eta : {1, 3, 8}) {
    p.eta = eta;
    p.t_delta = 0;
    const auto base = collection_gather(p);
    p.t_delta = 5;
    CHECK(collection_gather(p) - base == 5 * ((8 + eta - 1) / eta));
  }
}

TEST_CASE("identical packets give no improvement") {
  AnalyticParams p = conv1_8x8();
  p.rows = p.cols = 1;
  p.eta = 1;
  p.gather_flits = p.unicast_flits;
  CHECK(improvement(p) == 0.0);
}

TEST_CASE("improvement shrinks as the stream grows") {
  AnalyticParams p = conv1_8x8();
  double last = improvement(p);
  for (std::int64_t c = 4; c < 600; c += 37) {
    p.channels = c;
    const double now = improvement(p);
    CHECK(now < last);
    last = now;
  }
}

TEST_CASE("a larger mesh improves more for every layer") {
  const LayerDatabase db = LayerDatabase::builtin();
  for (const LayerConfig& l : db.layers()) {
    CAPTURE(l.layer);
    const double small = improvement(AnalyticParams::from(l, MeshConfig::square(8)));
    const double large = improvement(AnalyticParams::from(l, MeshConfig::square(16)));
    CHECK(large > small);
    CHECK(small > 0.0);
  }
}

TEST_CASE("gather never loses on the experiment grid") {
  const LayerDatabase db = LayerDatabase::builtin();
  for (int n : {4, 8, 16}) {
    for (const LayerConfig& l : db.layers()) {
      const auto p = AnalyticParams::from(l, MeshConfig::square(n));
      CHECK(latency_gather(p) <= latency_ru(p));
    }
  }
}

TEST_CASE("half-up rounding") {
  CHECK(percent_rounded(0.00125) == doctest::Approx(0.13));
  CHECK(percent_rounded(0.0292) == doctest::Approx(2.92));
  CHECK(percent_rounded(0.029197) == doctest::Approx(2.92));
  CHECK(percent_rounded(0.5, 0) == doctest::Approx(50.0));
}
