#pragma once

#include <optional>

#include "imb/geometry/types.h"

namespace imb {

inline constexpr double kDepthConsistencyTolerance = 0.05;

struct Reprojection {
  Vec2 pixel;    // in image j
  double depth;  // predicted depth in camera j
};

// Back-projects `pixel` of image i with its interpolated depth and projects
// it into camera j. Absent when the source depth is invalid or the point
// falls behind camera j. Does not test visibility in j.
std::optional<Reprojection> ReprojectWithDepth(const Vec2& pixel,
                                               const CameraModel& cam_i,
                                               const DepthMap& depth_i,
                                               const CameraModel& cam_j);

// |predicted - observed| / observed < tolerance, observed > 0.
bool IsDepthConsistent(double predicted, double observed,
                       double tolerance = kDepthConsistencyTolerance);

// ReprojectWithDepth followed by the in-image and occlusion checks against
// depth_j.
std::optional<Reprojection> ReprojectVisible(const Vec2& pixel,
                                             const CameraModel& cam_i,
                                             const DepthMap& depth_i,
                                             const CameraModel& cam_j,
                                             const DepthMap& depth_j);

}  // namespace imb
