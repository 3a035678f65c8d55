#include "imb/geometry/triangulation.h"

#include <cmath>

#include <Eigen/SVD>

#include "imb/util/error.h"

namespace imb {

std::optional<Vec3> TryTriangulate(const Vec2& xi, const Vec2& xj,
                                   const Mat34& Pi, const Mat34& Pj) {
  if (!xi.allFinite() || !xj.allFinite() || !Pi.allFinite() ||
      !Pj.allFinite()) {
    return std::nullopt;
  }
  Eigen::Matrix4d A;
  A.row(0) = xi.x() * Pi.row(2) - Pi.row(0);
  A.row(1) = xi.y() * Pi.row(2) - Pi.row(1);
  A.row(2) = xj.x() * Pj.row(2) - Pj.row(0);
  A.row(3) = xj.y() * Pj.row(2) - Pj.row(1);
  for (int r = 0; r < 4; ++r) {
    const double n = A.row(r).norm();
    if (n > 0.0) A.row(r) /= n;
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d& s = svd.singularValues();
  if (!(s(2) >= 1e-12 * s(0))) return std::nullopt;
  const Eigen::Vector4d X = svd.matrixV().col(3);
  if (!(std::abs(X(3)) > 1e-12 * X.head<3>().norm())) return std::nullopt;
  return X.hnormalized();
}

Vec3 Triangulate(const Vec2& xi, const Vec2& xj, const Mat34& Pi,
                 const Mat34& Pj) {
  const auto X = TryTriangulate(xi, xj, Pi, Pj);
  if (!X) Throw(ErrorCode::kNoIntersection, "no intersection");
  return *X;
}

}  // namespace imb
