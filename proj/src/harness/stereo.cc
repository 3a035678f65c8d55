#include "imb/harness/stereo.h"

#include <chrono>
#include <filesystem>

#include "imb/estimators/pose.h"
#include "imb/io/pairs.h"
#include "imb/util/error.h"
#include "imb/util/parallel.h"
#include "imb/util/random.h"
#include "imb/util/text_io.h"

namespace imb {

namespace fs = std::filesystem;

namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string SceneKey(const std::string& data_root, const std::string& name) {
  return data_root + "\n" + name;
}

MatchList FilterDirected(const MatchList& m, const FeatureSet& fi, const FeatureSet& fj,
                         const MatchingConfig& config) {
  if (!config.fginn) return RatioFilter(m, config.ratio);
  const KeypointList& targets =
      m.direction == MatchDirection::kIToJ ? fj.keypoints : fi.keypoints;
  return FginnFilter(m, fi.descriptors, fj.descriptors, targets, config.ratio,
                     config.min_geom_dist);
}

std::vector<std::string> MissingInputs(const RunConfig& config,
                                       const std::vector<const SceneBundle*>& preloaded) {
  std::vector<std::string> missing;
  for (size_t s = 0; s < config.scenes.size(); ++s) {
    const std::string& name = config.scenes[s];
    if (preloaded[s] != nullptr) {
      if (!preloaded[s]->features.count(config.method)) {
        missing.push_back(name + ": no features for method " + config.method);
      }
      continue;
    }
    std::vector<std::string> files = MissingSceneFiles(config.data_root, name);
    const fs::path dir = fs::path(config.data_root) / name;
    std::error_code ec;
    if (files.empty()) {
      for (const char* kind : {"keypoints", "descriptors"}) {
        const fs::path p = dir / kind / config.method;
        if (!fs::is_directory(p, ec)) files.push_back(p.string() + "/");
      }
    }
    missing.insert(missing.end(), files.begin(), files.end());
  }
  return missing;
}

}  // namespace

MatchList MatchPair(const FeatureSet& fi, const FeatureSet& fj, const MatchingConfig& config) {
  MatchList out;
  if (config.mode == MatchingMode::kUni) {
    out = FilterDirected(NnMatch(fi.descriptors, fj.descriptors, MatchDirection::kIToJ), fi,
                         fj, config);
  } else {
    const MatchList ij =
        FilterDirected(NnMatch(fi.descriptors, fj.descriptors, MatchDirection::kIToJ), fi, fj,
                       config);
    const MatchList ji =
        FilterDirected(NnMatch(fi.descriptors, fj.descriptors, MatchDirection::kJToI), fi, fj,
                       config);
    out = Symmetrize(ij, ji,
                     config.mode == MatchingMode::kBoth ? SymmetrizeMode::kBoth
                                                        : SymmetrizeMode::kEither);
  }
  if (config.max_distance) out = DistanceFilter(out, *config.max_distance);
  return out;
}

int SceneStereoResult::NumScoredPairs() const {
  int n = 0;
  for (const PairRecord& p : pairs) n += p.excluded ? 0 : 1;
  return n;
}

double StereoTimings::MeanPairSeconds() const {
  double sum = 0.0;
  int n = 0;
  for (size_t s = 0; s < estimation_seconds.size(); ++s) {
    for (size_t p = 0; p < estimation_seconds[s].size(); ++p) {
      const std::vector<double>& reps = estimation_seconds[s][p];
      if (reps.empty()) continue;
      double est = 0.0;
      for (const double t : reps) est += t;
      sum += matching_seconds[s][p] + est / reps.size();
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

bool StereoReport::operator==(const StereoReport& other) const {
  return config == other.config && scenes == other.scenes && overall == other.overall &&
         mean_inlier_ratio == other.mean_inlier_ratio;
}

const SceneBundle& StereoCache::Scene(const std::string& data_root, const std::string& name) {
  const std::string key = SceneKey(data_root, name);
  auto it = scenes_.find(key);
  if (it == scenes_.end()) {
    it = scenes_.emplace(key, std::make_unique<SceneBundle>(LoadScene(data_root, name))).first;
  }
  return *it->second;
}

const SceneBundle* StereoCache::FindScene(const std::string& data_root,
                                          const std::string& name) const {
  const auto it = scenes_.find(SceneKey(data_root, name));
  return it == scenes_.end() ? nullptr : it->second.get();
}

void StereoCache::AddScene(const std::string& data_root, SceneBundle scene) {
  const std::string key = SceneKey(data_root, scene.name);
  scenes_[key] = std::make_unique<SceneBundle>(std::move(scene));
}

std::shared_ptr<const StereoCache::PairMatchTable> StereoCache::FindMatches(
    const std::string& key) const {
  if (!match_caching_) return nullptr;
  const auto it = matches_.find(key);
  return it == matches_.end() ? nullptr : it->second;
}

void StereoCache::StoreMatches(const std::string& key,
                               std::shared_ptr<const PairMatchTable> table) {
  if (match_caching_) matches_[key] = std::move(table);
}

uint64_t PairSeed(uint64_t run_seed, const std::string& scene, const std::string& image_i,
                  const std::string& image_j, int repeat) {
  uint64_t h = HashCombine(run_seed, HashString(scene));
  h = HashCombine(h, HashString(image_i));
  h = HashCombine(h, HashString(image_j));
  return HashCombine(h, static_cast<uint64_t>(repeat));
}

StereoReport RunStereo(const RunConfig& config, StereoCache* cache) {
  const auto run_start = std::chrono::steady_clock::now();
  config.Validate();
  StereoCache local_cache;
  StereoCache& store = cache != nullptr ? *cache : local_cache;

  // Scenes already held by the cache need no files on disk.
  std::vector<const SceneBundle*> preloaded;
  for (const std::string& name : config.scenes) {
    preloaded.push_back(store.FindScene(config.data_root, name));
  }
  const std::vector<std::string> missing = MissingInputs(config, preloaded);
  if (!missing.empty()) {
    std::string message = "missing inputs (" + std::to_string(missing.size()) + "):";
    for (const std::string& m : missing) message += "\n  " + m;
    Throw(ErrorCode::kValidation, message);
  }

  std::vector<const SceneBundle*> scenes;
  std::vector<std::vector<io::PairEntry>> pair_lists;
  size_t total_pairs = 0;
  for (const std::string& name : config.scenes) {
    const SceneBundle& scene = store.Scene(config.data_root, name);
    scenes.push_back(&scene);
    pair_lists.push_back(EnumeratePairs(scene, config.min_covisibility));
    total_pairs += pair_lists.back().size();
  }
  if (total_pairs == 0) {
    Throw(ErrorCode::kNoPairs, "no pairs with co-visibility >= " +
                                   std::to_string(config.min_covisibility));
  }

  StereoReport report;
  report.config = config;
  report.config.num_threads = 1;
  report.config.output_dir.clear();
  report.config.ransac.seed = 0;
  report.timings.matching_seconds.resize(scenes.size());
  report.timings.estimation_seconds.resize(scenes.size());

  std::vector<AccuracyCurve> scene_curves;
  std::vector<double> scene_ratios;
  for (size_t s = 0; s < scenes.size(); ++s) {
    const SceneBundle& scene = *scenes[s];
    const std::vector<io::PairEntry>& pairs = pair_lists[s];
    const int num_pairs = static_cast<int>(pairs.size());
    const auto& features = scene.features.at(config.method);

    // Matching, shared with earlier runs of the same matching setup.
    const std::string match_key = SceneKey(config.data_root, scene.name) + "\n" +
                                  config.method + "\n" + config.matching.Key() + "\nv=" +
                                  FormatDouble(config.min_covisibility);
    std::shared_ptr<const StereoCache::PairMatchTable> matches = store.FindMatches(match_key);
    if (!matches) {
      std::map<std::string, FeatureSet> truncated;
      for (const SceneImage& im : scene.images) {
        const FeatureSet& f = features.at(im.id);
        if (config.matching.feature_budget == 0) {
          truncated[im.id] = f;
        } else {
          TruncatedFeatures t =
              TruncateTopK(f.keypoints, f.descriptors, config.matching.feature_budget);
          truncated[im.id] = FeatureSet{std::move(t.keypoints), std::move(t.descriptors)};
        }
      }
      auto table = std::make_shared<StereoCache::PairMatchTable>(num_pairs);
      ParallelFor(num_pairs, config.num_threads, [&](int p) {
        const auto start = std::chrono::steady_clock::now();
        const FeatureSet& fi = truncated.at(pairs[p].image_i);
        const FeatureSet& fj = truncated.at(pairs[p].image_j);
        const MatchList m = MatchPair(fi, fj, config.matching);
        CachedPairMatches& out = (*table)[p];
        out.correspondences.reserve(m.entries.size());
        for (const Match& e : m.entries) {
          const Keypoint& a = fi.keypoints[e.index_i];
          const Keypoint& b = fj.keypoints[e.index_j];
          out.correspondences.push_back({Vec2(a.x, a.y), Vec2(b.x, b.y)});
        }
        out.seconds = SecondsSince(start);
      });
      matches = table;
      store.StoreMatches(match_key, matches);
    }

    SceneStereoResult result;
    result.name = scene.name;
    result.pairs.resize(num_pairs);
    std::vector<RelativeMotion> truth(num_pairs);
    for (int p = 0; p < num_pairs; ++p) {
      PairRecord& rec = result.pairs[p];
      rec.image_i = pairs[p].image_i;
      rec.image_j = pairs[p].image_j;
      rec.covisibility = pairs[p].covisibility;
      rec.num_tentatives = static_cast<int>((*matches)[p].correspondences.size());
      truth[p] = RelativeMotionBetween(scene.images[scene.ImageIndex(rec.image_i)].camera,
                                       scene.images[scene.ImageIndex(rec.image_j)].camera);
      rec.excluded = truth[p].translation.norm() < kPureRotationBaseline;
      if (!rec.excluded) rec.attempts.resize(config.repeats);
    }

    // One task per (pair, repeat); each writes only its own slot.
    std::vector<std::vector<double>> est_seconds(num_pairs);
    std::vector<std::pair<int, int>> tasks;
    for (int p = 0; p < num_pairs; ++p) {
      if (result.pairs[p].excluded) continue;
      est_seconds[p].resize(config.repeats);
      for (int r = 0; r < config.repeats; ++r) tasks.emplace_back(p, r);
    }
    ParallelFor(static_cast<int>(tasks.size()), config.num_threads, [&](int t) {
      const auto [p, r] = tasks[t];
      const auto start = std::chrono::steady_clock::now();
      PairRecord& rec = result.pairs[p];
      PairAttempt& attempt = rec.attempts[r];
      attempt.seed = PairSeed(config.seed, scene.name, rec.image_i, rec.image_j, r);
      RansacConfig ransac = config.ransac;
      ransac.seed = attempt.seed;
      const SceneImage& im_i = scene.images[scene.ImageIndex(rec.image_i)];
      const SceneImage& im_j = scene.images[scene.ImageIndex(rec.image_j)];
      try {
        const PoseEstimate est = EstimatePoseFromMatches((*matches)[p].correspondences,
                                                         im_i.camera, im_j.camera, ransac);
        attempt.num_inliers = est.model.num_inliers;
        attempt.iterations = est.model.iterations;
        attempt.error = ComputePairPoseError(est.pose.rotation, est.pose.translation,
                                             truth[p].rotation, truth[p].translation,
                                             config.error_mode);
      } catch (const Error& e) {
        attempt.status = std::string(ErrorCodeName(e.code()));
        attempt.error = PairPoseError::Failed();
      }
      attempt.inlier_ratio =
          rec.num_tentatives == 0 ? 0.0 : double(attempt.num_inliers) / rec.num_tentatives;
      est_seconds[p][r] = SecondsSince(start);
    });

    double ratio_sum = 0.0;
    int ratio_count = 0;
    for (int r = 0; r < config.repeats; ++r) {
      std::vector<double> errors;
      for (const PairRecord& rec : result.pairs) {
        if (rec.excluded) continue;
        errors.push_back(rec.attempts[r].error.combined_deg);
        ratio_sum += rec.attempts[r].inlier_ratio;
        ++ratio_count;
      }
      if (!errors.empty()) result.repeat_curves.push_back(ComputeAccuracyCurve(errors));
    }
    if (!result.repeat_curves.empty()) {
      result.curve = MeanCurve(result.repeat_curves);
      result.mean_inlier_ratio = ratio_sum / ratio_count;
      scene_curves.push_back(*result.curve);
      scene_ratios.push_back(result.mean_inlier_ratio);
    }
    std::vector<double> match_seconds(num_pairs);
    for (int p = 0; p < num_pairs; ++p) match_seconds[p] = (*matches)[p].seconds;
    report.timings.matching_seconds[s] = std::move(match_seconds);
    report.timings.estimation_seconds[s] = std::move(est_seconds);
    report.scenes.push_back(std::move(result));
  }
  if (scene_curves.empty()) {
    Throw(ErrorCode::kNoPairs, "no pair has a ground-truth baseline to score");
  }
  report.overall = MeanCurve(scene_curves);
  double ratio_sum = 0.0;
  for (const double r : scene_ratios) ratio_sum += r;
  report.mean_inlier_ratio = ratio_sum / scene_ratios.size();
  report.timings.total_seconds = SecondsSince(run_start);
  return report;
}

}  // namespace imb
