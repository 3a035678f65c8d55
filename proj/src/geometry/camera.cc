#include <algorithm>
#include <cmath>
#include <cstring>

#include <Eigen/SVD>

#include "imb/geometry/types.h"
#include "imb/util/error.h"

namespace imb {

void CameraModel::Validate() const {
  auto fail = [](const std::string& what) {
    Throw(ErrorCode::kInvalidCalibration, "invalid calibration: " + what);
  };
  if (!intrinsics.allFinite() || !rotation.allFinite() ||
      !translation.allFinite()) {
    fail("non-finite entries");
  }
  if (width < 1 || height < 1) fail("image size must be at least 1x1");
  if (intrinsics(1, 0) != 0.0 || intrinsics(2, 0) != 0.0 ||
      intrinsics(2, 1) != 0.0) {
    fail("intrinsics not upper triangular");
  }
  if (intrinsics(2, 2) != 1.0) fail("intrinsics bottom row must be (0,0,1)");
  if (!(intrinsics(0, 0) > 0.0) || !(intrinsics(1, 1) > 0.0)) {
    fail("focal lengths must be positive");
  }
  const double orth =
      (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(orth < 1e-9)) fail("rotation not orthonormal");
  if (!(rotation.determinant() > 0.0)) fail("rotation determinant not +1");
}

bool operator==(const CameraModel& a, const CameraModel& b) {
  return a.intrinsics == b.intrinsics && a.rotation == b.rotation &&
         a.translation == b.translation && a.width == b.width &&
         a.height == b.height;
}

Mat34 CameraModel::ProjectionMatrix() const {
  Mat34 Rt;
  Rt.leftCols<3>() = rotation;
  Rt.col(3) = translation;
  return intrinsics * Rt;
}

Vec2 CameraModel::ProjectCameraPoint(const Vec3& cam) const {
  const Vec3 h = intrinsics * cam;
  return h.hnormalized();
}

bool CameraModel::InImage(const Vec2& px) const {
  // Pixel centers sit at integer coordinates; the image spans
  // [-0.5, w - 0.5) x [-0.5, h - 0.5).
  return px.x() >= -0.5 && px.y() >= -0.5 && px.x() < width - 0.5 &&
         px.y() < height - 0.5;
}

Vec2 CameraModel::Normalize(const Vec2& px) const {
  return intrinsics.triangularView<Eigen::Upper>()
      .solve(px.homogeneous())
      .hnormalized();
}

RelativeMotion RelativeMotionBetween(const CameraModel& cam_i,
                                     const CameraModel& cam_j) {
  RelativeMotion m;
  m.rotation = cam_j.rotation * cam_i.rotation.transpose();
  m.translation = cam_j.translation - m.rotation * cam_i.translation;
  return m;
}

Mat3 Skew(const Vec3& v) {
  Mat3 S;
  S << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return S;
}

FundamentalMatrix FundamentalMatrix::FromMatrix(const Mat3& F) {
  IMB_CHECK_ARG(F.allFinite(), "fundamental matrix must be finite");
  const double norm = F.norm();
  IMB_CHECK_ARG(norm > 0.0, "fundamental matrix must be nonzero");
  const Mat3 Fn = F / norm;
  Eigen::JacobiSVD<Mat3> svd(Fn);
  if (!(svd.singularValues()(2) < 1e-9)) {
    Throw(ErrorCode::kInvalidArgument,
          "fundamental matrix is not rank 2 (smallest singular value " +
              std::to_string(svd.singularValues()(2)) + ")");
  }
  return FundamentalMatrix(Fn);
}

FundamentalMatrix FundamentalMatrix::ProjectToRank2(const Mat3& F) {
  IMB_CHECK_ARG(F.allFinite() && F.norm() > 0.0,
                "fundamental matrix must be finite and nonzero");
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 s = svd.singularValues();
  s(2) = 0.0;
  const Mat3 F2 = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  return FundamentalMatrix(F2 / F2.norm());
}

EssentialMatrix EssentialMatrix::Project(const Mat3& E) {
  IMB_CHECK_ARG(E.allFinite() && E.norm() > 0.0,
                "essential matrix must be finite and nonzero");
  Eigen::JacobiSVD<Mat3> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double mean = 0.5 * (svd.singularValues()(0) + svd.singularValues()(1));
  IMB_CHECK_ARG(mean > 0.0, "essential matrix has rank < 2");
  const Mat3 P = svd.matrixU() * Vec3(mean, mean, 0.0).asDiagonal() *
                 svd.matrixV().transpose();
  return EssentialMatrix(P / P.norm());
}

EssentialMatrix EssentialMatrix::FromMotion(const Mat3& rotation,
                                            const Vec3& translation) {
  IMB_CHECK_ARG(translation.norm() > 0.0, "zero translation");
  const Mat3 E = Skew(translation.normalized()) * rotation;
  return EssentialMatrix(E / E.norm());
}

std::optional<double> DepthMap::Interpolate(const Vec2& px) const {
  if (!(px.x() >= 0.0 && px.y() >= 0.0 && px.x() <= width - 1 &&
        px.y() <= height - 1)) {
    return std::nullopt;
  }
  const int x0 = static_cast<int>(std::floor(px.x()));
  const int y0 = static_cast<int>(std::floor(px.y()));
  const double fx = px.x() - x0;
  const double fy = px.y() - y0;
  double acc = 0.0;
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      const double w = wx[dx] * wy[dy];
      if (w == 0.0) continue;
      const float d = at(x0 + dx, y0 + dy);
      if (!(d > 0.0f)) return std::nullopt;
      acc += w * d;
    }
  }
  return acc;
}

bool operator==(const DepthMap& a, const DepthMap& b) {
  if (a.width != b.width || a.height != b.height ||
      a.values.size() != b.values.size()) {
    return false;
  }
  // Bitwise comparison so NaN payloads and signed zeros round-trip exactly.
  return std::equal(a.values.begin(), a.values.end(), b.values.begin(),
                    [](float x, float y) {
                      return std::memcmp(&x, &y, sizeof(float)) == 0;
                    });
}

}  // namespace imb
