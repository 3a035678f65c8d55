#include "imb/metrics/alignment.h"

#include <cmath>

#include <Eigen/SVD>

#include "imb/util/error.h"

namespace imb {

TrajectoryAlignment AlignSimilarity(std::span<const Vec3> source,
                                    std::span<const Vec3> target) {
  IMB_CHECK_ARG(source.size() == target.size(),
                "alignment needs equally sized point sets");
  const int n = static_cast<int>(source.size());
  if (n < 3) {
    Throw(ErrorCode::kAlignmentUnderdetermined,
          "alignment underdetermined: fewer than 3 points");
  }
  Vec3 mu_s = Vec3::Zero(), mu_t = Vec3::Zero();
  for (int k = 0; k < n; ++k) {
    mu_s += source[k];
    mu_t += target[k];
  }
  mu_s /= n;
  mu_t /= n;
  Mat3 cov = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  double var_s = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec3 ds = source[k] - mu_s;
    cov += (target[k] - mu_t) * ds.transpose();
    spread += ds * ds.transpose();
    var_s += ds.squaredNorm();
  }
  cov /= n;
  var_s /= n;

  Eigen::JacobiSVD<Mat3> spread_svd(spread);
  const Vec3 sv = spread_svd.singularValues();
  if (!(sv(1) > 1e-12 * sv(0))) {
    Throw(ErrorCode::kAlignmentUnderdetermined,
          "alignment underdetermined: collinear points");
  }

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 S = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    S(2, 2) = -1.0;
  }
  TrajectoryAlignment a;
  a.rotation = svd.matrixU() * S * svd.matrixV().transpose();
  a.scale = (svd.singularValues().asDiagonal() * S).trace() / var_s;
  a.translation = mu_t - a.scale * a.rotation * mu_s;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) sq += (a.Apply(source[k]) - target[k]).squaredNorm();
  a.rmse = std::sqrt(sq / n);
  return a;
}

std::optional<double> AbsoluteTrajectoryError(
    std::span<const Vec3> estimated, std::span<const Vec3> ground_truth) {
  if (estimated.size() < 3) return std::nullopt;
  try {
    return AlignSimilarity(estimated, ground_truth).rmse;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kAlignmentUnderdetermined) return std::nullopt;
    throw;
  }
}

}  // namespace imb
