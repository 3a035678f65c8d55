#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imb/estimators/fundamental_ransac.h"
#include "imb/metrics/pose_error.h"
#include "imb/synthetic/scene_generator.h"

namespace imb {

// uni matches from the lower-index image only; both/either symmetrize the
// two directed lists.
enum class MatchingMode { kUni, kBoth, kEither };

std::string MatchingModeName(MatchingMode mode);
MatchingMode ParseMatchingMode(const std::string& name);

struct MatchingConfig {
  int feature_budget = 0;  // K; 0 keeps every keypoint
  MatchingMode mode = MatchingMode::kBoth;
  double ratio = 0.8;
  bool fginn = false;
  double min_geom_dist = 10.0;
  std::optional<double> max_distance;

  // Canonical string identifying the matching stage, used as a cache key.
  std::string Key() const;
  bool operator==(const MatchingConfig&) const = default;
};

struct RunConfig {
  std::string data_root;
  std::vector<std::string> scenes;
  std::string method;
  MatchingConfig matching;
  RansacConfig ransac;  // ransac.seed is replaced by per-pair seeds
  ErrorCombination error_mode = ErrorCombination::kMax;
  double min_covisibility = 0.1;
  int num_threads = 1;
  std::string output_dir;
  uint64_t seed = 0;
  int repeats = 1;

  bool operator==(const RunConfig&) const = default;

  // Range checks only; input files are checked by the runners, which list
  // everything missing at once. Throws kValidation.
  void Validate() const;
};

// Default parallelism: IMB_NUM_THREADS if set and positive, else 1.
int DefaultNumThreads();

// The RunConfig form omits num_threads and output_dir, which never affect
// results, so it can be echoed into deterministic reports.
nlohmann::ordered_json ToJson(const RansacConfig& config);
nlohmann::ordered_json ToJson(const MatchingConfig& config);
nlohmann::ordered_json ToJson(const RunConfig& config);
nlohmann::ordered_json ToJson(const SynthSpec& spec);

// Missing keys keep their defaults; unknown keys and wrong types throw
// kValidation.
RansacConfig RansacConfigFromJson(const nlohmann::ordered_json& j);
MatchingConfig MatchingConfigFromJson(const nlohmann::ordered_json& j);
RunConfig RunConfigFromJson(const nlohmann::ordered_json& j);
SynthSpec SynthSpecFromJson(const nlohmann::ordered_json& j);

}  // namespace imb
