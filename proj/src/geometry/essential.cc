#include "imb/geometry/essential.h"

#include <cmath>

#include <Eigen/SVD>

#include "imb/geometry/triangulation.h"
#include "imb/util/error.h"

namespace imb {

EssentialMatrix ComposeEssential(const FundamentalMatrix& F,
                                 const CameraModel& cam_i,
                                 const CameraModel& cam_j) {
  cam_i.Validate();
  cam_j.Validate();
  for (const CameraModel* cam : {&cam_i, &cam_j}) {
    const double det = cam->intrinsics.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-12) {
      Throw(ErrorCode::kInvalidCalibration, "invalid calibration: singular K");
    }
  }
  const Mat3 E = cam_j.intrinsics.transpose() * F.matrix() * cam_i.intrinsics;
  return EssentialMatrix::Project(E);
}

std::array<RelativePose, 4> DecomposeEssential(const EssentialMatrix& E) {
  Eigen::JacobiSVD<Mat3> svd(E.matrix(),
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  Mat3 V = svd.matrixV();
  if (U.determinant() < 0.0) U = -U;
  if (V.determinant() < 0.0) V = -V;
  Mat3 W;
  W << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const Mat3 R1 = U * W * V.transpose();
  const Mat3 R2 = U * W.transpose() * V.transpose();
  const Vec3 t = U.col(2).normalized();
  return {RelativePose{R1, t}, RelativePose{R1, -t}, RelativePose{R2, t},
          RelativePose{R2, -t}};
}

CheiralityResult SelectCheirality(const std::array<RelativePose, 4>& candidates,
                                  std::span<const PointPair> normalized) {
  IMB_CHECK_ARG(!normalized.empty(), "cheirality needs at least one point");
  Mat34 Pi = Mat34::Zero();
  Pi.leftCols<3>().setIdentity();
  CheiralityResult best;
  best.num_in_front = -1;
  for (int c = 0; c < 4; ++c) {
    Mat34 Pj;
    Pj.leftCols<3>() = candidates[c].rotation;
    Pj.col(3) = candidates[c].translation;
    int count = 0;
    for (const PointPair& p : normalized) {
      const auto X = TryTriangulate(p.xi, p.xj, Pi, Pj);
      if (!X) continue;
      const double zi = X->z();
      const double zj = (candidates[c].rotation * *X +
                         candidates[c].translation).z();
      if (zi > 0.0 && zj > 0.0) ++count;
    }
    if (count > best.num_in_front) {
      best.num_in_front = count;
      best.candidate_index = c;
      best.pose = candidates[c];
    }
  }
  if (best.num_in_front <= 0) {
    Throw(ErrorCode::kCheiralityUndecidable, "cheirality undecidable");
  }
  return best;
}

}  // namespace imb
