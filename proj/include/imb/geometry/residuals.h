#pragma once

#include "imb/geometry/types.h"

namespace imb {

enum class ResidualKind { kSymmetricEpipolar, kSampson };

// Root-mean-square of the two point-to-epipolar-line distances, in pixels:
// sqrt((d(x_j, F x_i)^2 + d(x_i, F^T x_j)^2) / 2).
//
// Both residuals are invariant to the scale of F. When an epipolar line
// has a zero gradient the distance is 0 if x_j^T F x_i == 0 and +inf
// otherwise.
double SymmetricEpipolarDistance(const Mat3& F, const Vec2& xi, const Vec2& xj);

// First-order geometric (Sampson) distance.
double SampsonDistance(const Mat3& F, const Vec2& xi, const Vec2& xj);

double EpipolarResidual(ResidualKind kind, const Mat3& F, const Vec2& xi,
                        const Vec2& xj);

}  // namespace imb
