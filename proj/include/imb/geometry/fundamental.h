#pragma once

#include <array>
#include <span>
#include <vector>

#include "imb/geometry/types.h"

namespace imb {

// Similarity taking the points' centroid to the origin and their RMS
// distance from it to sqrt(2).
Mat3 HartleyNormalization(std::span<const Vec2> points);

// Minimal solver. Returns 1 or 3 rank-2, unit-norm matrices, each fitting
// the seven correspondences. Throws kDegenerateSample when the constraint
// matrix has a null space of dimension > 2 (e.g. repeated points).
std::vector<FundamentalMatrix> SevenPoint(std::span<const PointPair> sample);

// Linear least squares over >= 8 correspondences with optional per-row
// weights, followed by rank-2 projection. Throws kDegenerateSample when the
// design matrix has rank < 8.
FundamentalMatrix EightPoint(std::span<const PointPair> pairs,
                             std::span<const double> weights = {});

// Eight-point refit whose equations are weighted by the inverse Sampson
// gradient norm of `reference`, evaluated in the normalized frame.
FundamentalMatrix EightPointSampsonWeighted(std::span<const PointPair> pairs,
                                            const Mat3& reference);

namespace internal {

// Allocation-free seven-point core used inside RANSAC. Writes up to three
// unnormalized models (pixel coordinates) and returns their count, or -1
// for a degenerate sample.
int SevenPointRaw(const std::array<PointPair, 7>& sample,
                  std::array<Mat3, 3>* models);

}  // namespace internal
}  // namespace imb
