#pragma once

#include <optional>

#include "imb/geometry/types.h"
#include "imb/matching/features.h"
#include "imb/matching/matcher.h"

namespace imb {

struct RepeatabilityInput {
  const KeypointList* keypoints_i;
  const KeypointList* keypoints_j;
  const CameraModel* cam_i;
  const CameraModel* cam_j;
  const DepthMap* depth_i;
  const DepthMap* depth_j;
};

// Fraction of co-visible keypoints whose depth reprojection has a keypoint
// of the other image within px_threshold, averaged over both directions.
// Absent when no keypoint is co-visible.
std::optional<double> Repeatability(const RepeatabilityInput& in, double px_threshold);

// As Repeatability, but the nearest keypoint must also be the keypoint's
// match in `matches`.
std::optional<double> MatchingScore(const RepeatabilityInput& in,
                                    const MatchList& matches, double px_threshold);

}  // namespace imb
