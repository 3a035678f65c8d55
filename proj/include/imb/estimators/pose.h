#pragma once

#include <span>

#include "imb/estimators/fundamental_ransac.h"
#include "imb/geometry/types.h"

namespace imb {

struct PoseEstimate {
  RelativePose pose;
  EpipolarModel model;
  int num_in_front = 0;  // inliers passing the cheirality test
};

// F -> E = K_j^T F K_i -> four factorizations -> cheirality over the
// inliers, normalized with the known intrinsics. Propagates
// kEstimationFailed / kCheiralityUndecidable.
PoseEstimate EstimatePoseFromMatches(std::span<const PointPair> matches,
                                     const CameraModel& cam_i,
                                     const CameraModel& cam_j,
                                     const RansacConfig& config);

}  // namespace imb
