#include "imb/geometry/depth.h"

#include <cmath>

namespace imb {

std::optional<Reprojection> ReprojectWithDepth(const Vec2& pixel,
                                               const CameraModel& cam_i,
                                               const DepthMap& depth_i,
                                               const CameraModel& cam_j) {
  const auto depth = depth_i.Interpolate(pixel);
  if (!depth || !(*depth > 0.0)) return std::nullopt;
  const Vec3 ray = cam_i.intrinsics.triangularView<Eigen::Upper>().solve(
      pixel.homogeneous());
  const Vec3 cam_point_i = *depth * ray;  // ray has unit z
  const Vec3 world =
      cam_i.rotation.transpose() * (cam_point_i - cam_i.translation);
  const Vec3 cam_point_j = cam_j.ToCamera(world);
  if (!(cam_point_j.z() > 0.0)) return std::nullopt;
  return Reprojection{cam_j.ProjectCameraPoint(cam_point_j), cam_point_j.z()};
}

bool IsDepthConsistent(double predicted, double observed, double tolerance) {
  if (!(observed > 0.0)) return false;
  return std::abs(predicted - observed) / observed < tolerance;
}

std::optional<Reprojection> ReprojectVisible(const Vec2& pixel,
                                             const CameraModel& cam_i,
                                             const DepthMap& depth_i,
                                             const CameraModel& cam_j,
                                             const DepthMap& depth_j) {
  auto r = ReprojectWithDepth(pixel, cam_i, depth_i, cam_j);
  if (!r || !cam_j.InImage(r->pixel)) return std::nullopt;
  const auto observed = depth_j.Interpolate(r->pixel);
  if (!observed || !IsDepthConsistent(r->depth, *observed)) {
    return std::nullopt;
  }
  return r;
}

}  // namespace imb
