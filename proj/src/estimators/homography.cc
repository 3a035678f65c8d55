#include "imb/estimators/homography.h"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "imb/geometry/fundamental.h"

namespace imb {

double TransferError(const Mat3& H, const PointPair& pair) {
  const Vec3 h = H * pair.xi.homogeneous();
  if (h.z() == 0.0) return std::numeric_limits<double>::infinity();
  return (h.hnormalized() - pair.xj).norm();
}

std::optional<Mat3> PlaneInducedHomography(
    const Mat3& F, const std::array<PointPair, 3>& pts) {
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU);
  const Vec3 e = svd.matrixU().col(2);  // F^T e = 0
  const Mat3 A = Skew(e) * F;
  Mat3 M;
  Vec3 b;
  for (int k = 0; k < 3; ++k) {
    const Vec3 xi = pts[k].xi.homogeneous();
    const Vec3 xj = pts[k].xj.homogeneous();
    M.row(k) = xi.transpose();
    const Vec3 xe = xj.cross(e);
    const double den = xe.squaredNorm();
    if (!(den > 1e-24)) return std::nullopt;
    b(k) = xj.cross(A * xi).dot(xe) / den;
  }
  Eigen::FullPivLU<Mat3> lu(M);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return std::nullopt;
  const Mat3 H = A - e * lu.solve(b).transpose();
  if (!H.allFinite()) return std::nullopt;
  return H;
}

std::optional<Mat3> HomographyDlt(std::span<const PointPair> pairs) {
  const int n = static_cast<int>(pairs.size());
  if (n < 4) return std::nullopt;
  std::vector<Vec2> xi(n), xj(n);
  for (int k = 0; k < n; ++k) {
    xi[k] = pairs[k].xi;
    xj[k] = pairs[k].xj;
  }
  const Mat3 Ti = HartleyNormalization(xi);
  const Mat3 Tj = HartleyNormalization(xj);
  Eigen::Matrix<double, Eigen::Dynamic, 9> A(2 * n, 9);
  for (int k = 0; k < n; ++k) {
    const Vec3 p = Ti * xi[k].homogeneous();
    const Vec3 q = Tj * xj[k].homogeneous();
    A.row(2 * k) << 0, 0, 0, -p.x(), -p.y(), -1, q.y() * p.x(), q.y() * p.y(),
        q.y();
    A.row(2 * k + 1) << p.x(), p.y(), 1, 0, 0, 0, -q.x() * p.x(),
        -q.x() * p.y(), -q.x();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 9>> svd(
      A, Eigen::ComputeFullV);
  if (!(svd.singularValues()(7) > 1e-10 * svd.singularValues()(0))) {
    return std::nullopt;
  }
  const auto h = svd.matrixV().col(8);
  Mat3 Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 H = Tj.inverse() * Hn * Ti;
  if (!H.allFinite()) return std::nullopt;
  return H / H.norm();
}

}  // namespace imb
