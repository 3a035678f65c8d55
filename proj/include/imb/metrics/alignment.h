#pragma once

#include <optional>
#include <span>

#include "imb/geometry/types.h"

namespace imb {

// x -> scale * rotation * x + translation.
struct TrajectoryAlignment {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double rmse = 0.0;

  Vec3 Apply(const Vec3& x) const { return scale * rotation * x + translation; }
};

// Closed-form least-squares similarity (Umeyama) taking `source` onto
// `target`. Throws kAlignmentUnderdetermined for fewer than 3 points or
// collinear source points.
TrajectoryAlignment AlignSimilarity(std::span<const Vec3> source,
                                    std::span<const Vec3> target);

// Absolute trajectory error: RMSE of estimated camera centers after the
// optimal similarity alignment onto ground truth. Absent when fewer than 3
// centers are given or the alignment is underdetermined.
std::optional<double> AbsoluteTrajectoryError(std::span<const Vec3> estimated,
                                              std::span<const Vec3> ground_truth);

}  // namespace imb
