#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imb/harness/config.h"
#include "imb/io/scene.h"
#include "imb/matching/matcher.h"
#include "imb/metrics/accuracy.h"
#include "imb/metrics/pose_error.h"

namespace imb {

// Tentative matches of image i (query side for uni) against image j after
// ratio or FGINN filtering, symmetrization and the optional distance filter.
// Features are expected to be truncated already.
MatchList MatchPair(const FeatureSet& features_i, const FeatureSet& features_j,
                    const MatchingConfig& config);

// One estimation attempt of a pair.
struct PairAttempt {
  uint64_t seed = 0;
  std::string status = "ok";  // otherwise the error code name
  int num_inliers = 0;
  double inlier_ratio = 0.0;  // inliers over tentatives
  int64_t iterations = 0;
  PairPoseError error = PairPoseError::Failed();

  bool operator==(const PairAttempt&) const = default;
};

struct PairRecord {
  std::string image_i;
  std::string image_j;
  double covisibility = 0.0;
  // Ground truth without baseline: no attempts, not scored.
  bool excluded = false;
  int num_tentatives = 0;
  std::vector<PairAttempt> attempts;  // one per repeat

  bool operator==(const PairRecord&) const = default;
};

struct SceneStereoResult {
  std::string name;
  std::vector<PairRecord> pairs;
  std::vector<AccuracyCurve> repeat_curves;
  // Mean of the repeat curves; absent when no pair can be scored.
  std::optional<AccuracyCurve> curve;
  double mean_inlier_ratio = 0.0;  // over scored pairs and repeats

  int NumScoredPairs() const;
  bool operator==(const SceneStereoResult&) const = default;
};

// Wall-clock measurements, kept apart from the results so that reports
// stay reproducible.
struct StereoTimings {
  // Per scene, per pair.
  std::vector<std::vector<double>> matching_seconds;
  // Per scene, per pair, per repeat.
  std::vector<std::vector<std::vector<double>>> estimation_seconds;
  double total_seconds = 0.0;

  // Mean over scored pairs of matching time plus mean estimation time.
  double MeanPairSeconds() const;
};

struct StereoReport {
  RunConfig config;  // echo; seeds, thread count and output dir normalized
  std::vector<SceneStereoResult> scenes;
  AccuracyCurve overall;           // mean over scenes with a curve
  double mean_inlier_ratio = 0.0;  // mean over those scenes
  StereoTimings timings;

  // Compares everything except timings.
  bool operator==(const StereoReport& other) const;
};

struct CachedPairMatches {
  std::vector<PointPair> correspondences;
  double seconds = 0.0;
};

// Loaded scenes and matching results reused across runs that share them.
// Not thread-safe; owned by one orchestrating thread.
class StereoCache {
 public:
  const SceneBundle& Scene(const std::string& data_root, const std::string& name);
  const SceneBundle* FindScene(const std::string& data_root, const std::string& name) const;
  // Registers an in-memory scene under (data_root, name).
  void AddScene(const std::string& data_root, SceneBundle scene);

  using PairMatchTable = std::vector<CachedPairMatches>;
  std::shared_ptr<const PairMatchTable> FindMatches(const std::string& key) const;
  void StoreMatches(const std::string& key, std::shared_ptr<const PairMatchTable> table);
  void set_match_caching(bool enabled) { match_caching_ = enabled; }
  bool match_caching() const { return match_caching_; }

 private:
  std::map<std::string, std::unique_ptr<SceneBundle>> scenes_;
  std::map<std::string, std::shared_ptr<const PairMatchTable>> matches_;
  bool match_caching_ = true;
};

// Seed of one estimation attempt, independent of scheduling.
uint64_t PairSeed(uint64_t run_seed, const std::string& scene, const std::string& image_i,
                  const std::string& image_j, int repeat);

// Evaluates every co-visible pair of every scene. Throws kValidation when
// inputs are missing (all listed at once), kNoPairs when nothing can be
// scored. Per-pair failures are recorded, never thrown.
StereoReport RunStereo(const RunConfig& config, StereoCache* cache = nullptr);

}  // namespace imb
