#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.h"

namespace imb {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ofstream(dir_.path() / "spec.json")
        << R"({"scene_name": "tiny", "num_cameras": 5, "num_points": 400,
               "image_width": 320, "image_height": 240, "descriptor_dim": 16,
               "keypoint_noise_px": 0.5, "seed": 3})";
    ASSERT_EQ(Run("synth --spec " + Path("spec.json") + " --out " + Path("data")), 0) << err_;
  }

  // Exit status of the CLI; stdout and stderr are kept in out_ and err_.
  int Run(const std::string& args) {
    const std::string cmd = std::string(IMB_CLI_PATH) + " " + args + " >" + Path("stdout") +
                            " 2>" + Path("stderr");
    const int status = std::system(cmd.c_str());
    out_ = Slurp(dir_.path() / "stdout");
    err_ = Slurp(dir_.path() / "stderr");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Path(const std::string& name) const { return (dir_.path() / name).string(); }

  std::string StereoArgs() const {
    return "stereo --data-root " + Path("data") + " --scenes tiny --method synth";
  }

  nlohmann::json Report(const std::string& out_dir) const {
    return nlohmann::json::parse(Slurp(dir_.path() / out_dir / "stereo.json"));
  }

  TempDir dir_{"cli"};
  std::string out_;
  std::string err_;
};

TEST_F(CliTest, ValidateAcceptsGeneratedScene) {
  EXPECT_EQ(Run("validate --data-root " + Path("data") + " --scenes tiny"), 0) << err_;
  EXPECT_NE(out_.find("tiny: ok"), std::string::npos);
}

TEST_F(CliTest, ValidateRejectsCorruptedScene) {
  std::ofstream(dir_.path() / "data" / "tiny" / "observations.txt", std::ios::app) << "oops\n";
  EXPECT_EQ(Run("validate --data-root " + Path("data") + " --scenes tiny"), 1);
  EXPECT_NE(err_.find("observations.txt:line"), std::string::npos) << err_;
}

TEST_F(CliTest, StereoWritesReports) {
  EXPECT_EQ(Run(StereoArgs() + " --max-iterations 2000 --output-dir " + Path("out")), 0) << err_;
  EXPECT_NE(out_.find("overall mAA@10"), std::string::npos);
  for (const char* f : {"stereo.json", "stereo_pairs.csv", "stereo_curve.csv"}) {
    EXPECT_TRUE(fs::is_regular_file(dir_.path() / "out" / f)) << f;
  }
  EXPECT_EQ(Report("out")["config"]["ransac"]["max_iterations"], 2000);
}

TEST_F(CliTest, UsageErrorsExitWithOne) {
  EXPECT_EQ(Run(""), 1);
  EXPECT_EQ(Run("stereo --scenes tiny --method synth"), 1);
  EXPECT_EQ(Run(StereoArgs() + " --bogus"), 1);
  EXPECT_EQ(Run(StereoArgs() + " --matching-mode sideways"), 1);
  EXPECT_EQ(Run(StereoArgs() + " --threshold -1"), 1);
}

TEST_F(CliTest, MissingInputsExitWithOneAndAreListed) {
  EXPECT_EQ(Run("stereo --data-root " + Path("data") + " --scenes tiny gone lost --method synth"),
            1);
  EXPECT_NE(err_.find("gone"), std::string::npos) << err_;
  EXPECT_NE(err_.find("lost"), std::string::npos) << err_;
}

TEST_F(CliTest, MalformedSpecExitsWithOne) {
  std::ofstream(dir_.path() / "bad.json") << "{\"num_cameras\": ";
  EXPECT_EQ(Run("synth --spec " + Path("bad.json") + " --out " + Path("data2")), 1);
  std::ofstream(dir_.path() / "unknown.json") << R"({"num_camera": 4})";
  EXPECT_EQ(Run("synth --spec " + Path("unknown.json") + " --out " + Path("data2")), 1);
}

TEST_F(CliTest, ConfigFileSuppliesFlagsAndCommandLineWins) {
  std::ofstream(dir_.path() / "run.toml")
      << "[stereo]\nthreshold = 2.5\nmax_iterations = 3000\nmin-covisibility = 0.2\n";
  const std::string base = "--config " + Path("run.toml") + " " + StereoArgs() + " --formats json";
  ASSERT_EQ(Run(base + " --output-dir " + Path("a")), 0) << err_;
  const nlohmann::json a = Report("a")["config"];
  EXPECT_EQ(a["ransac"]["threshold"], 2.5);
  EXPECT_EQ(a["ransac"]["max_iterations"], 3000);
  EXPECT_EQ(a["min_covisibility"], 0.2);
  EXPECT_FALSE(fs::exists(dir_.path() / "a" / "stereo_pairs.csv"));
  ASSERT_EQ(Run(base + " --threshold 1.5 --output-dir " + Path("b")), 0) << err_;
  EXPECT_EQ(Report("b")["config"]["ransac"]["threshold"], 1.5);
}

TEST_F(CliTest, ConfigFileRejectsUnknownKeys) {
  std::ofstream(dir_.path() / "typo.toml") << "[stereo]\ntreshold = 2.5\n";
  EXPECT_EQ(Run("--config " + Path("typo.toml") + " " + StereoArgs()), 1);
}

TEST_F(CliTest, CalibrateSyntheticPrintsSuggestion) {
  ASSERT_EQ(Run("calibrate --synthetic --sample-pairs 2 --target-seconds 0.2"), 0) << err_;
  const nlohmann::json j = nlohmann::json::parse(out_);
  EXPECT_EQ(j["sample_pairs"], 2);
  EXPECT_GE(j["suggested_max_iterations"].get<int64_t>(), 1000);
  EXPECT_EQ(Run("calibrate"), 1);
}

TEST_F(CliTest, SweepRanksGridPoints) {
  ASSERT_EQ(Run("sweep --data-root " + Path("data") +
                " --scenes tiny --method synth --max-iterations 2000 --thresholds 0.5 2"),
            0)
      << err_;
  EXPECT_NE(out_.find("1. "), std::string::npos);
  EXPECT_NE(out_.find("2. "), std::string::npos);
}

}  // namespace
}  // namespace imb
