#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace imb {

using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// A pixel correspondence between image i and image j.
struct PointPair {
  Vec2 xi;
  Vec2 xj;
};

// Pinhole camera with world-to-camera pose: x_cam = R * x_world + t.
struct CameraModel {
  Mat3 intrinsics = Mat3::Identity();
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  int width = 1;
  int height = 1;

  // Throws kInvalidCalibration describing the first violated invariant.
  void Validate() const;

  Vec3 Center() const { return -rotation.transpose() * translation; }
  Mat34 ProjectionMatrix() const;
  Vec3 ToCamera(const Vec3& world) const {
    return rotation * world + translation;
  }
  // Projects a camera-frame point; caller ensures positive depth.
  Vec2 ProjectCameraPoint(const Vec3& cam) const;
  Vec2 Project(const Vec3& world) const {
    return ProjectCameraPoint(ToCamera(world));
  }
  bool InImage(const Vec2& px) const;
  // Normalized camera coordinates (intrinsics removed).
  Vec2 Normalize(const Vec2& px) const;
};

bool operator==(const CameraModel& a, const CameraModel& b);

// Relative motion from camera i to camera j: x_j = R * x_i + t, |t| = 1.
struct RelativePose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::UnitX();
};

// Ground-truth relative motion between two cameras, translation unscaled.
struct RelativeMotion {
  Mat3 rotation;
  Vec3 translation;
};
RelativeMotion RelativeMotionBetween(const CameraModel& cam_i,
                                     const CameraModel& cam_j);

// Rank-2, unit Frobenius norm.
class FundamentalMatrix {
 public:
  // Scales to unit norm; throws kInvalidArgument unless rank 2.
  static FundamentalMatrix FromMatrix(const Mat3& F);
  // Closest rank-2 matrix (Frobenius), scaled to unit norm.
  static FundamentalMatrix ProjectToRank2(const Mat3& F);

  const Mat3& matrix() const { return matrix_; }

 private:
  explicit FundamentalMatrix(const Mat3& m) : matrix_(m) {}
  Mat3 matrix_;
};

// Two equal singular values and one zero, unit Frobenius norm.
class EssentialMatrix {
 public:
  // Projects onto the essential manifold: singular values (s, s, 0).
  static EssentialMatrix Project(const Mat3& E);
  // Essential matrix [t]x R of a relative motion.
  static EssentialMatrix FromMotion(const Mat3& rotation,
                                    const Vec3& translation);

  const Mat3& matrix() const { return matrix_; }

 private:
  explicit EssentialMatrix(const Mat3& m) : matrix_(m) {}
  Mat3 matrix_;
};

// Depth along the optical axis, row-major; values <= 0 are invalid.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  float at(int x, int y) const { return values[size_t(y) * width + x]; }
  // Bilinear interpolation with pixel centers at integer coordinates.
  // Absent if outside the grid or any contributing sample is invalid.
  std::optional<double> Interpolate(const Vec2& px) const;
};

bool operator==(const DepthMap& a, const DepthMap& b);

Mat3 Skew(const Vec3& v);

}  // namespace imb
