#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imb/geometry/types.h"
#include "imb/metrics/accuracy.h"
#include "imb/metrics/pose_error.h"

namespace imb {

// World-to-camera pose, x_cam = R x_world + t.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 Center() const { return -rotation.transpose() * translation; }
  bool operator==(const CameraPose&) const = default;
};

// Registered poses keyed by image id; absent ids are unregistered.
using Reconstruction = std::map<std::string, CameraPose>;

struct BagScore {
  AccuracyCurve curve;
  int num_pairs = 0;          // pairs contributing to the curve
  int num_excluded_pairs = 0; // zero ground-truth baseline
  int num_registered = 0;
  std::optional<double> ate;  // absent with < 3 registered cameras

  bool operator==(const BagScore&) const = default;
};

// Scores every unordered pair of the bag: relative pose from the
// reconstruction against the ground-truth relative pose; pairs with an
// unregistered member score +inf. Throws kInvalidArgument for bags smaller
// than 2 or ids missing from the ground truth.
BagScore ScoreBag(const Reconstruction& estimated,
                  const Reconstruction& ground_truth,
                  const std::vector<std::string>& bag,
                  ErrorCombination mode = ErrorCombination::kMax);

struct MultiviewAggregate {
  std::map<int, AccuracyCurve> per_size;  // mean over the bags of a size
  AccuracyCurve overall;                  // mean over sizes
  std::map<int, std::optional<double>> ate_per_size;
  std::optional<double> ate;

  bool operator==(const MultiviewAggregate&) const = default;
};

// Averages bags within each size, then the sizes.
MultiviewAggregate AggregateBags(
    const std::map<int, std::vector<BagScore>>& scores_by_size);

}  // namespace imb
