#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <limits>

#include "hsi/error.hpp"
#include "hsi/ingest.hpp"
#include "hsi/sampling.hpp"
#include "hsi/synthgen.hpp"
#include "support.hpp"

using namespace hsi;

namespace {
void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

template <class F>
ParseError::Kind kind_of(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError::Kind::Io;
}
}  // namespace

TEST(Ingest, CubeRoundTrip) {
  test::TempDir dir;
  for (std::uint64_t s = 0; s < 5; ++s) {
    synth::SceneConfig cfg;
    cfg.height = 9 + s;
    cfg.width = 7;
    cfg.bands = 3 + s;
    cfg.rng_seed = s;
    const auto scene = synth::generate_scene(cfg);
    io::write_cube(scene.cube, dir / "c.hsic");
    EXPECT_EQ(io::read_cube(dir / "c.hsic"), scene.cube);
  }
}

TEST(Ingest, CubeIsBandSequentialLittleEndian) {
  test::TempDir dir;
  const HyperCube c(1, 2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
  io::write_cube(c, dir / "c.hsic");
  const auto bytes = read_file(dir / "c.hsic");
  const auto nl = bytes.find('\n');
  EXPECT_EQ(bytes.substr(0, nl), "HSICUBE1 1 2 2 f32le");
  ASSERT_EQ(bytes.size(), nl + 1 + 16);
  float payload[4];
  std::memcpy(payload, bytes.data() + nl + 1, 16);
  EXPECT_EQ(payload[0], 1.0f);  // band 0 pixel 0
  EXPECT_EQ(payload[1], 3.0f);  // band 0 pixel 1
  EXPECT_EQ(payload[2], 2.0f);
  EXPECT_EQ(payload[3], 4.0f);
}

TEST(Ingest, CubeErrorsAreDistinct) {
  test::TempDir dir;
  const auto cube = test::random_cube(3, 3, 3, 2);
  io::write_cube(cube, dir / "ok.hsic");
  auto bytes = read_file(dir / "ok.hsic");

  write_file(dir / "magic.hsic", "XXXX" + bytes.substr(8));
  EXPECT_EQ(kind_of([&] { io::read_cube(dir / "magic.hsic"); }), ParseError::Kind::MagicMismatch);

  write_file(dir / "short.hsic", bytes.substr(0, bytes.size() - 4));
  try {
    io::read_cube(dir / "short.hsic");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Truncated);
    EXPECT_NE(std::string(e.what()).find("72"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("68"), std::string::npos) << e.what();
  }

  auto nan_bytes = bytes;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan_bytes.data() + nan_bytes.size() - 4, &nan, 4);
  write_file(dir / "nan.hsic", nan_bytes);
  EXPECT_EQ(kind_of([&] { io::read_cube(dir / "nan.hsic"); }), ParseError::Kind::NonFinite);

  EXPECT_EQ(kind_of([&] { io::read_cube(dir / "missing.hsic"); }), ParseError::Kind::Io);
}

TEST(Ingest, LabelsRoundTrip) {
  test::TempDir dir;
  const LabelMap m(2, 2, {1, 0, 2, 2});
  io::write_labels(m, dir / "l.txt");
  EXPECT_EQ(read_file(dir / "l.txt"), "2 2\n1 0\n2 2\n");
  EXPECT_EQ(io::read_labels(dir / "l.txt"), m);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = test::random_labels(s, 7, 11, 4);
    io::write_labels(r, dir / "r.txt");
    EXPECT_EQ(io::read_labels(dir / "r.txt"), r);
  }
}

TEST(Ingest, RaggedRowNamesLine) {
  test::TempDir dir;
  write_file(dir / "l.txt", "2 3\n1 1 1\n1 1\n");
  try {
    io::read_labels(dir / "l.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::RaggedRow);
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(Ingest, NegativeLabelRejected) {
  test::TempDir dir;
  write_file(dir / "l.txt", "1 2\n1 -2\n");
  EXPECT_EQ(kind_of([&] { io::read_labels(dir / "l.txt"); }), ParseError::Kind::BadValue);
}

TEST(Ingest, GapInClassesFailsAtConstruction) {
  test::TempDir dir;
  write_file(dir / "l.txt", "1 2\n1 3\n");
  EXPECT_THROW(io::read_labels(dir / "l.txt"), InvariantViolation);
}

TEST(Ingest, SplitRoundTrip) {
  test::TempDir dir;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto labels = test::random_labels(s, 9, 13, 3);
    const auto split = sampling::stratified_random_split(labels, 0.3, s * 7 + 1);
    io::write_split(split, dir / "s.txt");
    const auto back = io::read_split(dir / "s.txt", labels);
    EXPECT_EQ(back, split);
    EXPECT_EQ(back.seed(), s * 7 + 1);
  }
}

TEST(Ingest, SplitBadValue) {
  test::TempDir dir;
  const LabelMap labels(1, 2, {1, 1});
  write_file(dir / "s.txt", "1 2\nseed 3\n1 7\n");
  EXPECT_EQ(kind_of([&] { io::read_split(dir / "s.txt", labels); }), ParseError::Kind::BadValue);
}

TEST(Ingest, SplitTrainOnUnlabeled) {
  test::TempDir dir;
  const LabelMap labels(1, 2, {1, 0});
  write_file(dir / "s.txt", "1 2\nseed 3\n2 1\n");
  EXPECT_THROW(io::read_split(dir / "s.txt", labels), InvariantViolation);
}

TEST(Ingest, FeaturesRoundTripExactly) {
  test::TempDir dir;
  Rng rng(4);
  std::vector<double> v(5 * 3);
  for (auto& x : v) x = rng.normal() * 1e-3 + rng.uniform();
  const FeatureSet f(4, 4, 3, v, {{0, 0}, {1, 2}, {3, 3}, {2, 1}, {0, 3}});
  io::write_features(f, dir / "f.csv");
  EXPECT_EQ(io::read_features(dir / "f.csv", 4, 4), f);
}
