// Command-line entry point: stereo, multiview, sweep, calibrate, synth and
// validate subcommands. Exit status 0 on success, 1 on invalid input, 2 on
// runtime failure.

#include <algorithm>
#include <cstdio>
#include <memory>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imb/harness/calibrate.h"
#include "imb/harness/config.h"
#include "imb/harness/multiview.h"
#include "imb/harness/report.h"
#include "imb/harness/stereo.h"
#include "imb/harness/sweep.h"
#include "imb/io/pairs.h"
#include "imb/synthetic/scene_generator.h"
#include "imb/util/error.h"
#include "imb/util/random.h"
#include "imb/util/text_io.h"

namespace {

using imb::ErrorCode;
using nlohmann::ordered_json;

constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

// String-valued flags are parsed after CLI11 so errors name the flag.
struct RunFlags {
  imb::RunConfig config;
  std::string mode = "both";
  std::string variant = "degensac";
  std::string residual = "symmetric";
  std::string error_mode = "max";
  double max_distance = -1.0;
  bool no_lo = false;
  std::string formats = "json,csv";
};

void AddRunFlags(CLI::App* app, RunFlags* f) {
  imb::RunConfig& c = f->config;
  app->add_option("--data-root", c.data_root, "Dataset root directory")->required();
  app->add_option("--scenes", c.scenes, "Scene names")->required();
  app->add_option("--method", c.method, "Feature method name")->required();
  app->add_option("--feature-budget", c.matching.feature_budget, "Keypoints kept per image (0 = all)");
  app->add_option("--matching-mode", f->mode, "uni | both | either");
  app->add_option("--ratio", c.matching.ratio, "Ratio test threshold");
  app->add_flag("--fginn", c.matching.fginn, "Use the FGINN ratio test");
  app->add_option("--min-geom-dist", c.matching.min_geom_dist, "FGINN exclusion radius (px)");
  app->add_option("--max-distance", f->max_distance, "Descriptor distance filter (negative = off)");
  app->add_option("--variant", f->variant, "plain | degensac");
  app->add_option("--confidence", c.ransac.confidence, "RANSAC confidence tau");
  app->add_option("--threshold", c.ransac.threshold, "Inlier threshold eta (px)");
  app->add_option("--max-iterations", c.ransac.max_iterations, "Iteration cap Gamma");
  app->add_option("--residual", f->residual, "symmetric | sampson");
  app->add_flag("--no-lo", f->no_lo, "Disable local optimization");
  app->add_option("--error-mode", f->error_mode, "max | rotation | translation");
  app->add_option("--min-covisibility", c.min_covisibility, "Co-visibility threshold v");
  app->add_option("--num-threads", c.num_threads, "Worker threads (default IMB_NUM_THREADS or 1)");
  app->add_option("--output-dir", c.output_dir, "Report directory");
  app->add_option("--seed", c.seed, "Run seed");
  app->add_option("--repeats", c.repeats, "Repetitions per pair");
  app->add_option("--formats", f->formats, "Report formats: json, csv or json,csv");
}

imb::RunConfig FinishRunFlags(const RunFlags& f) {
  imb::RunConfig c = f.config;
  c.matching.mode = imb::ParseMatchingMode(f.mode);
  c.ransac.variant = imb::ParseRansacVariant(f.variant);
  if (f.residual == "symmetric") {
    c.ransac.residual = imb::ResidualKind::kSymmetricEpipolar;
  } else if (f.residual == "sampson") {
    c.ransac.residual = imb::ResidualKind::kSampson;
  } else {
    imb::Throw(ErrorCode::kInvalidArgument, "unknown residual: " + f.residual);
  }
  c.error_mode = imb::ParseErrorCombination(f.error_mode);
  if (f.max_distance >= 0.0) c.matching.max_distance = f.max_distance;
  c.ransac.local_optimization = !f.no_lo;
  c.Validate();
  return c;
}

imb::ReportFormats ParseFormats(const std::string& s) {
  imb::ReportFormats out{false, false};
  size_t start = 0;
  while (start <= s.size()) {
    const size_t end = std::min(s.find(',', start), s.size());
    const std::string item = s.substr(start, end - start);
    if (item == "json") {
      out.json = true;
    } else if (item == "csv") {
      out.csv = true;
    } else {
      imb::Throw(ErrorCode::kInvalidArgument, "unknown report format: " + item);
    }
    start = end + 1;
  }
  return out;
}

void PrintCurve(const char* label, const imb::AccuracyCurve& curve) {
  std::printf("%s mAA@10 = %.6f\n", label, curve.mAA);
}

int RunStereoCommand(const RunFlags& flags) {
  const imb::RunConfig config = FinishRunFlags(flags);
  const imb::ReportFormats formats = ParseFormats(flags.formats);
  const imb::StereoReport report = imb::RunStereo(config);
  for (const imb::SceneStereoResult& s : report.scenes) {
    if (s.curve) {
      std::printf("%s: %d pairs, ", s.name.c_str(), s.NumScoredPairs());
      PrintCurve("", *s.curve);
    }
  }
  PrintCurve("overall", report.overall);
  if (!config.output_dir.empty()) imb::EmitStereoReport(report, config.output_dir, formats);
  return 0;
}

struct SweepFlags {
  std::vector<double> ratios;
  std::vector<double> thresholds;
  std::vector<int64_t> max_iterations;
  std::vector<std::string> modes;
  bool no_cache = false;
};

int RunSweepCommand(const RunFlags& flags, const SweepFlags& sf) {
  const imb::RunConfig config = FinishRunFlags(flags);
  const imb::ReportFormats formats = ParseFormats(flags.formats);
  imb::SweepGrid grid;
  grid.ratios = sf.ratios;
  grid.thresholds = sf.thresholds;
  grid.max_iterations = sf.max_iterations;
  for (const std::string& m : sf.modes) grid.modes.push_back(imb::ParseMatchingMode(m));
  const imb::SweepResult result = imb::RunSweep(config, grid, !sf.no_cache);
  for (size_t i = 0; i < result.ranked.size(); ++i) {
    const imb::SweepEntry& e = result.ranked[i];
    std::printf("%zu. %s mAA@10 = %.6f%s\n", i + 1, e.point.Key().c_str(), e.mAA,
                e.failed ? " (failed)" : "");
  }
  if (!config.output_dir.empty()) imb::EmitSweepResult(result, config.output_dir, formats);
  return 0;
}

struct MultiviewFlags {
  imb::MultiviewConfig config;
  std::string error_mode = "max";
  std::string output_dir;
  std::string formats = "json,csv";
};

int RunMultiviewCommand(const MultiviewFlags& f) {
  imb::MultiviewConfig config = f.config;
  config.error_mode = imb::ParseErrorCombination(f.error_mode);
  const imb::ReportFormats formats = ParseFormats(f.formats);
  const imb::MultiviewReport report = imb::RunMultiview(config);
  for (const imb::SceneMultiviewResult& s : report.scenes) {
    std::printf("%s: %zu bags, %d missing, ", s.name.c_str(), s.bags.size(), s.num_missing);
    PrintCurve("", s.aggregate.overall);
  }
  PrintCurve("overall", report.overall);
  if (!f.output_dir.empty()) imb::EmitMultiviewReport(report, f.output_dir, formats);
  return 0;
}

struct CalibrateFlags {
  double target_seconds = 0.5;
  int sample_pairs = 10;
  bool synthetic = false;
  std::string data_root;
  std::vector<std::string> scenes;
  std::string method;
  double ratio = 0.8;
  double threshold = 1.0;
  std::string variant = "degensac";
  uint64_t seed = 0;
};

int RunCalibrateCommand(const CalibrateFlags& f) {
  if (f.sample_pairs < 1) imb::Throw(ErrorCode::kInvalidArgument, "--sample-pairs must be >= 1");
  imb::RansacConfig ransac;
  ransac.threshold = f.threshold;
  ransac.variant = imb::ParseRansacVariant(f.variant);
  ransac.seed = f.seed;
  ransac.Validate();
  std::vector<std::vector<imb::PointPair>> samples;
  if (f.synthetic) {
    // Half outliers with 1 px noise, the robustness scenario.
    imb::Random rng(f.seed);
    imb::PairSynthSpec spec;
    spec.num_inliers = 200;
    spec.outlier_fraction = 0.5;
    spec.noise_px = 1.0;
    for (int p = 0; p < f.sample_pairs; ++p) {
      samples.push_back(imb::SynthesizePair(spec, rng).correspondences);
    }
  } else {
    if (f.data_root.empty() || f.scenes.empty() || f.method.empty()) {
      imb::Throw(ErrorCode::kInvalidArgument,
                 "calibrate needs --synthetic or --data-root, --scenes and --method");
    }
    imb::MatchingConfig matching;
    matching.ratio = f.ratio;
    for (const std::string& name : f.scenes) {
      const imb::SceneBundle scene = imb::LoadScene(f.data_root, name);
      if (!scene.features.count(f.method)) {
        imb::Throw(ErrorCode::kValidation, name + ": no features for method " + f.method);
      }
      for (const imb::io::PairEntry& pair : imb::EnumeratePairs(scene, 0.1)) {
        if (static_cast<int>(samples.size()) >= f.sample_pairs) break;
        const imb::FeatureSet& fi = scene.Features(f.method, pair.image_i);
        const imb::FeatureSet& fj = scene.Features(f.method, pair.image_j);
        std::vector<imb::PointPair> corr;
        for (const imb::Match& m : imb::MatchPair(fi, fj, matching).entries) {
          const imb::Keypoint& a = fi.keypoints[m.index_i];
          const imb::Keypoint& b = fj.keypoints[m.index_j];
          corr.push_back({imb::Vec2(a.x, a.y), imb::Vec2(b.x, b.y)});
        }
        if (corr.size() >= 7) samples.push_back(std::move(corr));
      }
    }
    if (samples.empty()) imb::Throw(ErrorCode::kNoPairs, "no usable sample pairs");
  }
  const imb::BudgetCalibration cal = imb::CalibrateBudget(f.target_seconds, samples, ransac);
  ordered_json j;
  j["target_seconds"] = f.target_seconds;
  j["sample_pairs"] = cal.num_pairs;
  j["iterations_measured"] = cal.iterations_measured;
  j["seconds_per_iteration"] = cal.seconds_per_iteration;
  j["suggested_max_iterations"] = cal.suggested_max_iterations;
  std::cout << imb::DumpJson(j);
  return 0;
}

int RunSynthCommand(const std::string& spec_path, const std::string& out_dir) {
  const ordered_json j = [&] {
    try {
      return ordered_json::parse(imb::ReadFileBytes(spec_path));
    } catch (const ordered_json::parse_error& e) {
      throw imb::FormatError(spec_path + "@offset " + std::to_string(e.byte), e.what());
    }
  }();
  const imb::SynthSpec spec = imb::SynthSpecFromJson(j);
  const imb::SyntheticScene scene = imb::GenerateScene(spec);
  imb::SaveScene(scene.bundle, out_dir);
  std::printf("wrote scene %s (%zu images) to %s\n", spec.scene_name.c_str(),
              scene.bundle.images.size(), out_dir.c_str());
  return 0;
}

int RunValidateCommand(const std::string& data_root, const std::vector<std::string>& scenes) {
  int failures = 0;
  for (const std::string& name : scenes) {
    try {
      const imb::SceneBundle scene = imb::LoadScene(data_root, name);
      scene.Validate();
      std::printf("%s: ok (%zu images, %zu pairs)\n", name.c_str(), scene.images.size(),
                  scene.pairs.size());
    } catch (const imb::Error& e) {
      std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
      ++failures;
    }
  }
  return failures == 0 ? 0 : kExitInvalid;
}

// Config files may spell keys with underscores, as the JSON reports do.
class UnderscoreTolerantConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigTOML::from_config(input);
    for (CLI::ConfigItem& item : items) std::replace(item.name.begin(), item.name.end(), '_', '-');
    return items;
  }
};

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidCalibration:
    case ErrorCode::kValidation:
    case ErrorCode::kFormat:
    case ErrorCode::kNoPairs:
    case ErrorCode::kSampling:
      return kExitInvalid;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-view and multiview pose-accuracy benchmark"};
  app.set_config("--config", "", "TOML/INI file supplying any flag; flags on the command line win");
  app.config_formatter(std::make_shared<UnderscoreTolerantConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  RunFlags stereo_flags;
  stereo_flags.config.num_threads = imb::DefaultNumThreads();
  CLI::App* stereo = app.add_subcommand("stereo", "Evaluate every co-visible pair");
  AddRunFlags(stereo, &stereo_flags);

  RunFlags sweep_flags;
  sweep_flags.config.num_threads = imb::DefaultNumThreads();
  SweepFlags sweep_grid;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid search over ratio, eta, Gamma and mode");
  AddRunFlags(sweep, &sweep_flags);
  sweep->add_option("--ratios", sweep_grid.ratios, "Ratio test grid");
  sweep->add_option("--thresholds", sweep_grid.thresholds, "Inlier threshold grid");
  sweep->add_option("--max-iterations-grid", sweep_grid.max_iterations, "Gamma grid");
  sweep->add_option("--modes", sweep_grid.modes, "Matching mode grid");
  sweep->add_flag("--no-cache", sweep_grid.no_cache, "Recompute matches for every grid point");

  MultiviewFlags mv_flags;
  CLI::App* multiview = app.add_subcommand("multiview", "Score ingested bag reconstructions");
  multiview->add_option("--data-root", mv_flags.config.data_root, "Dataset root")->required();
  multiview->add_option("--scenes", mv_flags.config.scenes, "Scene names")->required();
  multiview->add_option("--recon-dir", mv_flags.config.recon_dir,
                        "Reconstructions: <dir>/<scene>/bag_<size>_<index>.txt")->required();
  multiview->add_option("--bag-sizes", mv_flags.config.bags.sizes, "Bag sizes");
  multiview->add_option("--bag-counts", mv_flags.config.bags.counts, "Bags per size");
  multiview->add_option("--bag-seed", mv_flags.config.bags.seed, "Bag sampling seed");
  multiview->add_option("--min-points", mv_flags.config.min_points, "Shared points per member");
  multiview->add_option("--error-mode", mv_flags.error_mode, "max | rotation | translation");
  multiview->add_option("--output-dir", mv_flags.output_dir, "Report directory");
  multiview->add_option("--formats", mv_flags.formats, "json, csv or json,csv");

  CalibrateFlags cal_flags;
  CLI::App* calibrate = app.add_subcommand("calibrate", "Suggest Gamma for a time budget");
  calibrate->add_option("--target-seconds", cal_flags.target_seconds, "Budget per pair");
  calibrate->add_option("--sample-pairs", cal_flags.sample_pairs, "Pairs to time");
  calibrate->add_flag("--synthetic", cal_flags.synthetic, "Time synthetic pairs");
  calibrate->add_option("--data-root", cal_flags.data_root, "Dataset root");
  calibrate->add_option("--scenes", cal_flags.scenes, "Scene names");
  calibrate->add_option("--method", cal_flags.method, "Feature method name");
  calibrate->add_option("--ratio", cal_flags.ratio, "Ratio test threshold");
  calibrate->add_option("--threshold", cal_flags.threshold, "Inlier threshold eta (px)");
  calibrate->add_option("--variant", cal_flags.variant, "plain | degensac");
  calibrate->add_option("--seed", cal_flags.seed, "Seed");

  std::string spec_path;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  synth->add_option("--spec", spec_path, "JSON scene spec")->required();
  synth->add_option("--out", synth_out, "Dataset root to write into")->required();

  std::string validate_root;
  std::vector<std::string> validate_scenes;
  CLI::App* validate = app.add_subcommand("validate", "Check scene files without evaluating");
  validate->add_option("--data-root", validate_root, "Dataset root")->required();
  validate->add_option("--scenes", validate_scenes, "Scene names")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*stereo) return RunStereoCommand(stereo_flags);
    if (*sweep) return RunSweepCommand(sweep_flags, sweep_grid);
    if (*multiview) return RunMultiviewCommand(mv_flags);
    if (*calibrate) return RunCalibrateCommand(cal_flags);
    if (*synth) return RunSynthCommand(spec_path, synth_out);
    if (*validate) return RunValidateCommand(validate_root, validate_scenes);
  } catch (const imb::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(imb::ErrorCodeName(e.code())).c_str(),
                 e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
