#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "imb/geometry/types.h"

namespace imb {

// Distance in image j between x_j and H x_i, pixels.
double TransferError(const Mat3& H, const PointPair& pair);

// Homography induced by the plane through three correspondences, compatible
// with F. Absent when the three image-i points are collinear or a point
// coincides with the epipole.
std::optional<Mat3> PlaneInducedHomography(const Mat3& F,
                                           const std::array<PointPair, 3>& pts);

// Normalized DLT over >= 4 correspondences. Absent when degenerate.
std::optional<Mat3> HomographyDlt(std::span<const PointPair> pairs);

}  // namespace imb
