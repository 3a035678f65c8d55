// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "format_fuzz.h"
#include "imb/estimators/pose.h"
#include "imb/geometry/fundamental.h"
#include "imb/geometry/residuals.h"
#include "imb/harness/multiview.h"
#include "imb/harness/report.h"
#include "imb/harness/stereo.h"
#include "imb/io/formats.h"
#include "imb/io/pairs.h"
#include "imb/io/scene.h"
#include "imb/matching/matcher.h"
#include "imb/metrics/accuracy.h"
#include "imb/metrics/alignment.h"
#include "imb/metrics/multiview.h"
#include "imb/metrics/pose_error.h"
#include "imb/synthetic/scene_generator.h"
#include "imb/util/error.h"
#include "imb/util/random.h"

namespace imb {
namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("imb_acceptance_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Combined pose errors of every (pair, repeat) for one RANSAC setup.
std::vector<double> PoseErrors(const std::vector<SyntheticPair>& pairs, RansacConfig config,
                               int repeats, uint64_t seed) {
  std::vector<double> errors;
  for (size_t p = 0; p < pairs.size(); ++p) {
    for (int r = 0; r < repeats; ++r) {
      config.seed = HashCombine(HashCombine(seed, p), static_cast<uint64_t>(r));
      try {
        const PoseEstimate est = EstimatePoseFromMatches(pairs[p].correspondences, pairs[p].cam_i,
                                                         pairs[p].cam_j, config);
        errors.push_back(ComputePairPoseError(est.pose.rotation, est.pose.translation,
                                              pairs[p].motion.rotation,
                                              pairs[p].motion.translation)
                             .combined_deg);
      } catch (const Error&) {
        errors.push_back(PairPoseError::Failed().combined_deg);
      }
    }
  }
  return errors;
}

std::vector<SyntheticPair> MakePairs(const PairSynthSpec& spec, int count, uint64_t seed) {
  std::vector<SyntheticPair> pairs;
  for (int p = 0; p < count; ++p) {
    Random rng(HashCombine(seed, static_cast<uint64_t>(p)));
    pairs.push_back(SynthesizePair(spec, rng));
  }
  return pairs;
}

Outcome NoiseFreeRecovery() {
  const auto start = std::chrono::steady_clock::now();
  PairSynthSpec spec;
  const std::vector<SyntheticPair> pairs = MakePairs(spec, 100, 101);
  RansacConfig config;
  double worst_r = 0.0;
  double worst_t = 0.0;
  int failures = 0;
  for (size_t p = 0; p < pairs.size(); ++p) {
    config.seed = p;
    try {
      const PoseEstimate est =
          EstimatePoseFromMatches(pairs[p].correspondences, pairs[p].cam_i, pairs[p].cam_j, config);
      worst_r = std::max(worst_r, RotationErrorDeg(est.pose.rotation, pairs[p].motion.rotation));
      worst_t = std::max(worst_t,
                         TranslationErrorDeg(est.pose.translation, pairs[p].motion.translation));
    } catch (const Error&) {
      ++failures;
    }
  }
  const double seconds = SecondsSince(start);
  return {failures == 0 && worst_r < 1e-3 && worst_t < 1e-3 && seconds < 30.0,
          Fmt("max rotation error %.3g deg, max translation error %.3g deg, %d failures, %.1f s",
              worst_r, worst_t, failures, seconds)};
}

Outcome Robustness() {
  const auto start = std::chrono::steady_clock::now();
  PairSynthSpec spec;
  spec.num_inliers = 100;
  spec.outlier_fraction = 0.5;
  spec.noise_px = 1.0;
  spec.image_width = 1024;
  spec.image_height = 768;
  const std::vector<SyntheticPair> pairs = MakePairs(spec, 100, 202);
  RansacConfig config;
  config.confidence = 0.999999;
  config.max_iterations = 250000;
  double best = 0.0;
  double best_eta = 0.0;
  std::string grid;
  for (const double eta : {0.5, 1.0, 2.0}) {
    config.threshold = eta;
    const double mAA = ComputeAccuracyCurve(PoseErrors(pairs, config, 3, 17)).mAA;
    grid += Fmt(" eta=%g:%.4f", eta, mAA);
    if (mAA > best) {
      best = mAA;
      best_eta = eta;
    }
  }
  const double seconds = SecondsSince(start);
  return {best >= 0.95 && seconds < 600.0,
          Fmt("best mAA@10 %.4f at eta=%g (need >= 0.95);", best, best_eta) + grid +
              Fmt("; %.0f s (limit 600)", seconds)};
}

Outcome DegensacBenefit() {
  PairSynthSpec spec;
  spec.num_inliers = 300;
  spec.outlier_fraction = 0.3;
  spec.planar_fraction = 0.9;
  spec.noise_px = 0.5;
  const std::vector<SyntheticPair> pairs = MakePairs(spec, 100, 303);
  std::string grid;
  auto best_of = [&](RansacVariant variant) {
    RansacConfig config;
    config.variant = variant;
    double best = 0.0;
    for (const double eta : {0.5, 1.0, 2.0}) {
      config.threshold = eta;
      const double mAA = ComputeAccuracyCurve(PoseErrors(pairs, config, 1, 29)).mAA;
      grid += Fmt(" %s@%g:%.3f", RansacVariantName(variant).c_str(), eta, mAA);
      best = std::max(best, mAA);
    }
    return best;
  };
  const double plain = best_of(RansacVariant::kPlain);
  const double degensac = best_of(RansacVariant::kDegensac);
  return {degensac - plain >= 0.05,
          Fmt("degensac %.4f vs plain %.4f, gain %.4f (need >= 0.05);", degensac, plain,
              degensac - plain) +
              grid};
}

Outcome MaaOracle() {
  const double three = ComputeAccuracyCurve(std::vector<double>{0.5, 3.5, 20.0}).mAA;

  // Coplanar ring, every camera turned by 5 degrees about the ring axis:
  // relative rotations are unchanged and every relative translation turns by
  // exactly 5 degrees.
  SynthSpec spec;
  spec.num_cameras = 30;
  spec.num_points = 1500;
  spec.image_width = 400;
  spec.image_height = 300;
  spec.descriptor_dim = 4;
  spec.camera_jitter = 0.0;
  spec.render_depth = false;
  spec.seed = 44;
  const SceneBundle scene = GenerateScene(spec).bundle;
  const Reconstruction truth = GroundTruthPoses(scene);
  const Mat3 G = AxisAngle(Vec3::UnitZ(), 5.0 * kPi / 180.0);
  Reconstruction perturbed;
  double pose_change = 0.0;
  for (const auto& [id, pose] : truth) {
    CameraPose p;
    p.rotation = pose.rotation * G;
    p.translation = -p.rotation * pose.Center();
    pose_change = std::max(pose_change,
                           std::abs(RotationErrorDeg(p.rotation, pose.rotation) - 5.0));
    perturbed[id] = p;
  }
  BagSpec bags;
  bags.sizes = {5, 10};
  bags.counts = {20, 10};
  bags.seed = 4;
  const auto sampled = SampleBags(scene, bags);
  const SceneMultiviewResult result = ScoreSceneBags(
      scene.name, truth, sampled,
      [&](int, int) -> std::optional<Reconstruction> { return perturbed; });
  const double multiview = result.aggregate.overall.mAA;
  return {std::abs(three - 17.0 / 30.0) <= 1e-12 && std::abs(multiview - 0.5) <= 1e-12 &&
              pose_change < 1e-9,
          Fmt("{0.5,3.5,20} -> %.15f (17/30 = %.15f); 5 deg perturbation -> %.15f over %zu bags",
              three, 17.0 / 30.0, multiview, result.bags.size())};
}

DescriptorSet RandomDescriptors(Random& rng, int count, bool binary) {
  if (binary) {
    std::vector<uint8_t> bits(size_t(count) * 4);
    for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.UniformInt(256));
    return DescriptorSet::Binary(count, 32, bits);
  }
  std::vector<float> v(size_t(count) * 6);
  for (float& x : v) x = static_cast<float>(rng.Normal());
  return DescriptorSet::Float(count, 6, v);
}

Outcome MatchingAlgebra() {
  Random rng(505);
  int subset_violations = 0;
  int monotone_violations = 0;
  int fginn_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool binary = trial % 2 == 1;
    const int ni = 2 + static_cast<int>(rng.UniformInt(40));
    const int nj = 2 + static_cast<int>(rng.UniformInt(40));
    const DescriptorSet di = RandomDescriptors(rng, ni, binary);
    const DescriptorSet dj = RandomDescriptors(rng, nj, binary);
    auto keypoints = [&](int n) {
      KeypointList kps(n);
      for (Keypoint& k : kps) {
        k.x = rng.Uniform(0, 100);
        k.y = rng.Uniform(0, 100);
      }
      return kps;
    };
    const KeypointList kp_i = keypoints(ni);
    const KeypointList kp_j = keypoints(nj);
    const MatchList ij = NnMatch(di, dj);
    const MatchList ji = NnMatch(di, dj, MatchDirection::kJToI);
    std::set<std::pair<int, int>> both, either;
    for (const Match& m : Symmetrize(ij, ji, SymmetrizeMode::kBoth).entries) {
      both.insert({m.index_i, m.index_j});
    }
    for (const Match& m : Symmetrize(ij, ji, SymmetrizeMode::kEither).entries) {
      either.insert({m.index_i, m.index_j});
    }
    if (!std::includes(either.begin(), either.end(), both.begin(), both.end())) {
      ++subset_violations;
    }
    for (const MatchList* list : {&ij, &ji}) {
      const KeypointList& targets = list == &ij ? kp_j : kp_i;
      size_t previous = 0;
      for (int step = 0; step <= 20; ++step) {
        const double r = step / 20.0;
        const MatchList ratio = RatioFilter(*list, r);
        if (ratio.entries.size() < previous) ++monotone_violations;
        previous = ratio.entries.size();
        if (FginnFilter(*list, di, dj, targets, r, 0.0).entries != ratio.entries) {
          ++fginn_violations;
        }
      }
    }
  }
  return {subset_violations + monotone_violations + fginn_violations == 0,
          Fmt("1000 sets: %d subset, %d monotonicity, %d FGINN(0) != ratio violations",
              subset_violations, monotone_violations, fginn_violations)};
}

Outcome SolverResiduals() {
  Random rng(606);
  double worst_seven = 0.0;
  int roots = 0;
  int degenerate = 0;
  PairSynthSpec seven_spec;
  seven_spec.num_inliers = 7;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<PointPair> sample;
    if (trial % 2 == 0) {
      for (int k = 0; k < 7; ++k) {
        sample.push_back({Vec2(rng.Uniform(0, 1024), rng.Uniform(0, 768)),
                          Vec2(rng.Uniform(0, 1024), rng.Uniform(0, 768))});
      }
    } else {
      sample = SynthesizePair(seven_spec, rng).correspondences;
    }
    try {
      for (const FundamentalMatrix& F : SevenPoint(sample)) {
        ++roots;
        for (const PointPair& p : sample) {
          worst_seven = std::max(
              worst_seven, std::abs(p.xj.homogeneous().dot(F.matrix() * p.xi.homogeneous())));
        }
      }
    } catch (const Error&) {
      ++degenerate;
    }
  }
  double worst_eight = 0.0;
  PairSynthSpec eight_spec;
  for (int trial = 0; trial < 100; ++trial) {
    const SyntheticPair pair = SynthesizePair(eight_spec, rng);
    const FundamentalMatrix F = EightPoint(pair.correspondences);
    for (const PointPair& p : pair.correspondences) {
      worst_eight = std::max(worst_eight, SymmetricEpipolarDistance(F.matrix(), p.xi, p.xj));
    }
  }
  return {worst_seven < 1e-8 && degenerate == 0 && worst_eight < 1e-6,
          Fmt("seven-point max |x'Fx| %.3g over %d roots of 10000 samples (%d degenerate); "
              "eight-point max symmetric distance %.3g px over 100 clean pairs",
              worst_seven, roots, degenerate, worst_eight)};
}

// Applies x -> sQx + c to the world frame of every camera.
Reconstruction TransformWorld(const Reconstruction& rec, double s, const Mat3& Q, const Vec3& c) {
  Reconstruction out;
  for (const auto& [id, pose] : rec) {
    CameraPose p;
    p.rotation = pose.rotation * Q.transpose();
    p.translation = -p.rotation * (s * Q * pose.Center() + c);
    out[id] = p;
  }
  return out;
}

Vec3 RandomVec(Random& rng, double scale) {
  return scale * Vec3(rng.Normal(), rng.Normal(), rng.Normal());
}

Outcome MetricInvariances() {
  Random rng(707);
  double maa_shift = 0.0;
  double ate_shift = 0.0;
  double ate_copy = 0.0;
  double align_error = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Reconstruction truth, noisy;
    std::vector<std::string> bag;
    for (int k = 0; k < 8; ++k) {
      const std::string id = "img" + std::to_string(k);
      CameraPose p;
      p.rotation = RandomRotation(rng, rng.Uniform(0.0, 3.0));
      p.translation = RandomVec(rng, 3.0);
      truth[id] = p;
      p.rotation = RandomRotation(rng, rng.Uniform(0.0, 0.15)) * p.rotation;
      p.translation += RandomVec(rng, 0.2);
      if (k != 3) noisy[id] = p;
      bag.push_back(id);
    }
    const double s = std::exp(rng.Uniform(-2.0, 2.0));
    const Mat3 Q = RandomRotation(rng, rng.Uniform(0.0, kPi));
    const Vec3 c = RandomVec(rng, 10.0);
    const BagScore base = ScoreBag(noisy, truth, bag);
    const BagScore moved = ScoreBag(TransformWorld(noisy, s, Q, c), truth, bag);
    maa_shift = std::max(maa_shift, std::abs(moved.curve.mAA - base.curve.mAA));
    ate_shift = std::max(ate_shift, std::abs(*moved.ate - *base.ate));
    const BagScore copy = ScoreBag(TransformWorld(truth, s, Q, c), truth, bag);
    ate_copy = std::max(ate_copy, *copy.ate);

    std::vector<Vec3> src, dst;
    for (int k = 0; k < 10; ++k) {
      src.push_back(RandomVec(rng, 1.0));
      dst.push_back(s * Q * src.back() + c);
    }
    const TrajectoryAlignment a = AlignSimilarity(src, dst);
    align_error = std::max({align_error, std::abs(a.scale - s), (a.rotation - Q).norm(),
                            (a.translation - c).norm()});
  }
  return {maa_shift <= 1e-9 && ate_shift <= 1e-9 && ate_copy <= 1e-9 && align_error <= 1e-9,
          Fmt("200 trials: mAA shift %.3g, ATE shift %.3g, ATE of similar copy %.3g, "
              "alignment error %.3g",
              maa_shift, ate_shift, ate_copy, align_error)};
}

Outcome ScaleStructure() {
  SynthSpec spec;
  spec.num_cameras = 100;
  spec.num_points = 3000;
  spec.image_width = 320;
  spec.image_height = 240;
  spec.descriptor_dim = 4;
  spec.render_depth = false;
  spec.seed = 808;
  const SceneBundle scene = GenerateScene(spec).bundle;
  const size_t pairs = EnumeratePairs(scene, 0.0).size();
  BagSpec bags;
  bags.seed = 8;
  size_t total = 0;
  for (const auto& [size, list] : SampleBags(scene, bags)) total += list.size();
  return {pairs == 4950 && total == 175,
          Fmt("N=100, v=0: %zu pairs (need 4950); bags {5,10,25}x{100,50,25}: %zu (need 175)",
              pairs, total)};
}

Outcome Determinism() {
  ScratchDir dir("determinism");
  RunConfig config;
  config.data_root = (dir.path() / "data").string();
  config.method = "synth";
  config.ransac.max_iterations = 20000;
  config.repeats = 2;
  config.seed = 909;
  for (uint64_t s = 0; s < 2; ++s) {
    SynthSpec spec;
    spec.scene_name = "scene" + std::to_string(s);
    spec.num_cameras = 8;
    spec.num_points = 800;
    spec.image_width = 640;
    spec.image_height = 480;
    spec.descriptor_dim = 32;
    spec.keypoint_noise_px = 1.0;
    spec.outlier_fraction = 0.3;
    spec.render_depth = false;
    spec.seed = 90 + s;
    SaveScene(GenerateScene(spec).bundle, config.data_root);
    config.scenes.push_back(spec.scene_name);
  }
  std::vector<std::string> reports;
  const std::vector<int> threads = {1, 4, 1, 3};
  for (size_t k = 0; k < threads.size(); ++k) {
    config.num_threads = threads[k];
    const std::string out = (dir.path() / ("run" + std::to_string(k))).string();
    EmitStereoReport(RunStereo(config), out, {true, false});
    std::ifstream in(fs::path(out) / "stereo.json", std::ios::binary);
    reports.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  int identical = 0;
  for (const std::string& r : reports) identical += r == reports[0] ? 1 : 0;
  return {identical == static_cast<int>(reports.size()) && !reports[0].empty(),
          Fmt("%d of %zu runs (threads 1, 4, 1, 3) byte-identical to the first, %zu bytes",
              identical, reports.size(), reports[0].size())};
}

Outcome FormatIntegrity() {
  int round_trip_failures = 0;
  std::string failed;
  for (const testing::FuzzTarget& t : testing::AllFormatTargets()) {
    const std::string path = "round_trip/" + t.name;
    std::string again;
    if (t.name == "calibration") again = io::SerializeCalibration(io::ParseCalibration(t.valid_bytes, path));
    if (t.name == "keypoints") again = io::SerializeKeypoints(io::ParseKeypoints(t.valid_bytes, path));
    if (t.name.rfind("descriptors", 0) == 0) {
      again = io::SerializeDescriptors(io::ParseDescriptors(t.valid_bytes, path));
    }
    if (t.name == "depth") again = io::SerializeDepth(io::ParseDepth(t.valid_bytes, path));
    if (t.name == "observations") {
      again = io::SerializeObservations(io::ParseObservations(t.valid_bytes, path));
    }
    if (t.name == "matches") again = io::SerializeMatches(io::ParseMatches(t.valid_bytes, path));
    if (t.name == "reconstruction") {
      again = io::SerializeReconstruction(io::ParseReconstruction(t.valid_bytes, path));
    }
    if (t.name == "pairs") again = io::SerializePairs(io::ParsePairs(t.valid_bytes, path));
    if (again != t.valid_bytes) {
      ++round_trip_failures;
      failed += " " + t.name;
    }
  }
  {
    ScratchDir dir("formats");
    const SceneBundle scene = testing::FuzzScene().bundle;
    SaveScene(scene, dir.path().string());
    if (!(LoadScene(dir.path().string(), scene.name) == scene)) {
      ++round_trip_failures;
      failed += " scene";
    }
  }
  int violations = 0;
  int rejected = 0;
  int accepted = 0;
  std::string first;
  int formats = 0;
  for (const testing::FuzzTarget& t : testing::AllFormatTargets()) {
    ++formats;
    const testing::FuzzOutcome out = testing::FuzzFormat(t, 10000, 1010);
    violations += static_cast<int>(out.violations.size());
    rejected += out.rejected;
    accepted += out.accepted;
    if (first.empty() && !out.violations.empty()) first = t.name + ": " + out.violations[0];
  }
  return {round_trip_failures == 0 && violations == 0,
          Fmt("round trips: %d failures%s; fuzz over %d formats x 10000: %d located rejections, "
              "%d valid loads, %d violations",
              round_trip_failures, failed.c_str(), formats, rejected, accepted, violations) +
              (first.empty() ? "" : " (first: " + first + ")")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace imb

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Criterion numbers to run (default all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<imb::Criterion> criteria = {
      {1, "noise-free recovery", imb::NoiseFreeRecovery},
      {2, "robustness", imb::Robustness},
      {3, "DEGENSAC benefit", imb::DegensacBenefit},
      {4, "mAA oracle", imb::MaaOracle},
      {5, "matching algebra", imb::MatchingAlgebra},
      {6, "solver residuals", imb::SolverResiduals},
      {7, "metric invariances", imb::MetricInvariances},
      {8, "scale structure", imb::ScaleStructure},
      {9, "determinism", imb::Determinism},
      {10, "format integrity", imb::FormatIntegrity},
  };
  int failures = 0;
  for (const imb::Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    imb::Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), imb::SecondsSince(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
