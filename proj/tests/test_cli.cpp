#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "hsi/cli.hpp"
#include "hsi/ingest.hpp"
#include "support.hpp"

using namespace hsi;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result hsi_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hsi");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto r = hsi_cli({"generate", "--cube", dir / "c.hsic", "--labels", dir / "l.txt", "--height", "24", "--width",
                        "24", "--bands", "8", "--classes", "3", "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  test::TempDir dir;
};

}  // namespace

TEST_F(Cli, RunBundledConfig) {
  const auto r = hsi_cli({"run", "--config", std::string(HSI_SOURCE_DIR) + "/configs/example.cfg", "--output", dir / "out"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto agg = slurp(dir / "out/aggregate.csv");
  EXPECT_EQ(agg.rfind("strategy,rate,feature,classifier,repetitions,failures,oa_mean", 0), 0u);
  EXPECT_GT(std::count(agg.begin(), agg.end(), '\n'), 1);
}

TEST_F(Cli, AuditAllTrainIsDataError) {
  const auto labels = io::read_labels(dir / "l.txt");
  std::vector<SplitState> s(labels.labels().size(), SplitState::Train);
  io::write_split(SplitMask(labels, s, 0), dir / "s.txt");
  const auto r = hsi_cli({"audit", "--labels", dir / "l.txt", "--split", dir / "s.txt", "--window", "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no test pixels"), std::string::npos) << r.err;
}

TEST_F(Cli, SampleDeterministic) {
  for (const char* name : {"a.txt", "b.txt"}) {
    const auto r = hsi_cli({"sample", "--labels", dir / "l.txt", "--strategy", "controlled", "--rate", "0.1", "--seed", "7",
                        "--out", dir / name});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt"));
  hsi_cli({"sample", "--labels", dir / "l.txt", "--strategy", "controlled", "--rate", "0.1", "--seed", "8", "--out",
       dir / "c.txt"});
  EXPECT_NE(slurp(dir / "a.txt"), slurp(dir / "c.txt"));
}

TEST_F(Cli, UnknownFlagPrintsUsage) {
  const auto r = hsi_cli({"sample", "--labels", dir / "l.txt", "--out", dir / "s.txt", "--bogus", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  EXPECT_EQ(hsi_cli({}).code, 1);
  EXPECT_EQ(hsi_cli({"frobnicate"}).code, 1);
}

TEST_F(Cli, BadValuesAreUsageErrors) {
  EXPECT_EQ(hsi_cli({"sample", "--labels", dir / "l.txt", "--out", dir / "s.txt", "--rate", "1.5"}).code, 1);
  EXPECT_EQ(hsi_cli({"sample", "--labels", dir / "l.txt", "--out", dir / "s.txt", "--strategy", "grid"}).code, 1);
  EXPECT_EQ(hsi_cli({"filter", "--cube", dir / "c.hsic", "--out", dir / "f.hsic", "--mean", "4"}).code, 1);
  EXPECT_EQ(hsi_cli({"sample", "--labels", dir / "missing.txt", "--out", dir / "s.txt"}).code, 2);
}

TEST_F(Cli, Pipeline) {
  ASSERT_EQ(hsi_cli({"sample", "--labels", dir / "l.txt", "--rate", "0.2", "--seed", "1", "--out", dir / "s.txt"}).code, 0);
  ASSERT_EQ(hsi_cli({"filter", "--cube", dir / "c.hsic", "--mean", "3", "--out", dir / "f.hsic"}).code, 0);
  ASSERT_EQ(hsi_cli({"features", "--cube", dir / "f.hsic", "--labels", dir / "l.txt", "--feature", "raw", "--out",
                 dir / "f.csv"})
                .code,
            0);
  auto r = hsi_cli({"classify", "--labels", dir / "l.txt", "--split", dir / "s.txt", "--features", dir / "f.csv",
                "--classifier", "rf:10", "--seed", "3", "--out", dir / "p.csv", "--map", dir / "p.ppm"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = hsi_cli({"evaluate", "--labels", dir / "l.txt", "--split", dir / "s.txt", "--predictions", dir / "p.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("metric,value\noa,", 0), 0u);
  r = hsi_cli({"audit", "--labels", dir / "l.txt", "--split", dir / "s.txt"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
  r = hsi_cli({"correlate", "--cube", dir / "f.hsic", "--max-lag", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("lag,rho,pairs\n0,1,", 0), 0u);
  r = hsi_cli({"correlate", "--cube", dir / "f.hsic", "--patch-radius", "1"});
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 10);
  ASSERT_EQ(hsi_cli({"render", "--labels", dir / "l.txt", "--out", dir / "t.ppm"}).code, 0);
  EXPECT_EQ(slurp(dir / "t.ppm").rfind("P6\n24 24\n255\n", 0), 0u);
}

TEST_F(Cli, RunIsReproducible) {
  const std::string cfg = std::string(HSI_SOURCE_DIR) + "/configs/example.cfg";
  ASSERT_EQ(hsi_cli({"run", "--config", cfg, "--output", dir / "a"}).code, 0);
  ASSERT_EQ(hsi_cli({"run", "--config", cfg, "--output", dir / "b"}).code, 0);
  EXPECT_EQ(slurp(dir / "a/results.csv"), slurp(dir / "b/results.csv"));
  ASSERT_EQ(hsi_cli({"run", "--config", cfg, "--output", dir / "c", "--seed", "99"}).code, 0);
  EXPECT_NE(slurp(dir / "a/results.csv"), slurp(dir / "c/results.csv"));
}
