#pragma once

#include <optional>

#include "imb/geometry/types.h"

namespace imb {

// Linear (DLT) two-view triangulation. Throws kNoIntersection when the rays
// are parallel: the second-smallest singular value of the DLT system is
// below 1e-12 of the largest, or the solution lies at infinity.
Vec3 Triangulate(const Vec2& xi, const Vec2& xj, const Mat34& Pi,
                 const Mat34& Pj);

// Non-throwing variant.
std::optional<Vec3> TryTriangulate(const Vec2& xi, const Vec2& xj,
                                   const Mat34& Pi, const Mat34& Pj);

}  // namespace imb
