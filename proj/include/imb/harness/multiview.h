#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imb/io/pairs.h"
#include "imb/metrics/multiview.h"

namespace imb {

struct MultiviewConfig {
  std::string data_root;
  std::vector<std::string> scenes;
  // Reconstructions live at <recon_dir>/<scene>/bag_<size>_<index>.txt.
  std::string recon_dir;
  BagSpec bags;
  int min_points = kDefaultBagMinPoints;
  ErrorCombination error_mode = ErrorCombination::kMax;

  // Throws kValidation.
  void Validate() const;
  bool operator==(const MultiviewConfig&) const = default;
};

std::string BagFileName(int size, int index);

struct BagRecord {
  int size = 0;
  int index = 0;
  Bag images;
  bool missing = false;  // no reconstruction file; scored as unregistered
  BagScore score;

  bool operator==(const BagRecord&) const = default;
};

struct SceneMultiviewResult {
  std::string name;
  std::vector<BagRecord> bags;  // by size, then index
  MultiviewAggregate aggregate;
  int num_missing = 0;

  bool operator==(const SceneMultiviewResult&) const = default;
};

struct MultiviewReport {
  MultiviewConfig config;
  std::vector<SceneMultiviewResult> scenes;
  AccuracyCurve overall;      // mean over scenes
  std::optional<double> ate;  // mean over scenes with an ATE

  bool operator==(const MultiviewReport&) const = default;
};

// Returns the reconstruction of a bag, or nothing when it is absent.
using ReconstructionLookup = std::function<std::optional<Reconstruction>(int size, int index)>;

// Scores the sampled bags of one scene against its ground-truth poses.
SceneMultiviewResult ScoreSceneBags(const std::string& name, const Reconstruction& ground_truth,
                                    const std::map<int, std::vector<Bag>>& bags,
                                    const ReconstructionLookup& lookup,
                                    ErrorCombination mode = ErrorCombination::kMax);

// Samples bags per scene and scores the reconstruction files. Missing scene
// inputs throw kValidation listing all of them; missing bag files are
// flagged and scored as unregistered.
MultiviewReport RunMultiview(const MultiviewConfig& config);

}  // namespace imb
