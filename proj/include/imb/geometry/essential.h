#pragma once

#include <array>
#include <span>

#include "imb/geometry/types.h"

namespace imb {

// E = normalize(K_j^T F K_i), projected onto the essential manifold.
// Throws kInvalidCalibration for invalid or singular intrinsics.
EssentialMatrix ComposeEssential(const FundamentalMatrix& F,
                                 const CameraModel& cam_i,
                                 const CameraModel& cam_j);

// The four (R, +-t) factorizations, ordered
// {(R1, t), (R1, -t), (R2, t), (R2, -t)}.
std::array<RelativePose, 4> DecomposeEssential(const EssentialMatrix& E);

struct CheiralityResult {
  RelativePose pose;
  int candidate_index = 0;
  int num_in_front = 0;
};

// Picks the candidate with the most triangulated points in front of both
// cameras; ties go to the lower index. Points are in normalized camera
// coordinates. Throws kCheiralityUndecidable when no candidate puts any
// point in front.
CheiralityResult SelectCheirality(const std::array<RelativePose, 4>& candidates,
                                  std::span<const PointPair> normalized);

}  // namespace imb
