#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gnoc/workload.hpp"

using namespace gnoc;

TEST_CASE("built-in layers") {
  const LayerConfig c1 = load_layer("alexnet", "conv1");
  CHECK(c1.channels == 3);
  CHECK(c1.kernels == 64);
  CHECK(c1.kernel_side == 11);
  CHECK(c1.side == 55);
  CHECK(c1.inputs == 55 * 55);
  CHECK(stream_length(c1) == 363);

  const LayerConfig v4 = load_layer("vgg16", "conv4");
  CHECK(v4.channels == 512);
  CHECK(v4.kernels == 512);
  CHECK(v4.side == 14);
  CHECK(stream_length(v4) == 4608);

  CHECK(stream_length(load_layer("alexnet", "conv3")) == 1728);
  CHECK(stream_length(load_layer("vgg16", "conv3")) == 2304);
  CHECK_THROWS_AS(load_layer("alexnet", "conv9"), UnknownLayerError);
  CHECK_THROWS_AS(load_layer("resnet", "conv1"), UnknownLayerError);
}

TEST_CASE("round counts") {
  const MeshConfig m;
  const LayerConfig c1 = load_layer("alexnet", "conv1");
  CHECK(round_count(c1.with_inputs(64), m) == 64);
  CHECK(round_count(c1.with_inputs(1), m) == 8);
  LayerConfig tiny = c1;
  tiny.inputs = 8;
  tiny.kernels = 8;
  CHECK(round_count(tiny, m) == 1);
  tiny.inputs = 9;
  tiny.kernels = 9;
  CHECK(round_count(tiny, m) == 4);
}

TEST_CASE("data file matches the built-in table") {
  const LayerDatabase file = LayerDatabase::load(GNOC_DATA_DIR "/layers.txt");
  const LayerDatabase builtin = LayerDatabase::builtin();
  CHECK(file.layers() == builtin.layers());
  CHECK(file.layers().size() == 9);
  CHECK(builtin.model("alexnet").size() == 5);
  CHECK(builtin.model("vgg16").size() == 4);
}

TEST_CASE("text round trip") {
  const LayerDatabase db = LayerDatabase::builtin();
  CHECK(LayerDatabase::parse(db.to_text()).layers() == db.layers());
}

TEST_CASE("malformed database lines") {
  CHECK_THROWS_AS(LayerDatabase::parse("alexnet conv1 3 64 11\n"), std::invalid_argument);
  CHECK_THROWS_AS(LayerDatabase::parse("alexnet conv1 3 64 11 55 9\n"), std::invalid_argument);
  CHECK_THROWS_AS(LayerDatabase::parse("alexnet conv1 0 64 11 55\n"), std::invalid_argument);
  CHECK(LayerDatabase::parse("# only a comment\n\n").layers().empty());
  CHECK_THROWS_AS(LayerDatabase::load("/nonexistent/layers.txt"), std::invalid_argument);
}
