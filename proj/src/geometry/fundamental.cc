#include "imb/geometry/fundamental.h"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "imb/util/error.h"

namespace imb {
namespace {

using Row9 = Eigen::Matrix<double, 1, 9>;

Row9 EpipolarRow(const Vec2& xi, const Vec2& xj) {
  Row9 row;
  row << xj.x() * xi.x(), xj.x() * xi.y(), xj.x(), xj.y() * xi.x(),
      xj.y() * xi.y(), xj.y(), xi.x(), xi.y(), 1.0;
  return row;
}

Mat3 Unstack(const Eigen::Matrix<double, 9, 1>& f) {
  Mat3 F;
  F << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);
  return F;
}

Vec2 Apply(const Mat3& T, const Vec2& x) {
  return Vec2(T(0, 0) * x.x() + T(0, 2), T(1, 1) * x.y() + T(1, 2));
}

template <typename GetPoint>
Mat3 NormalizationFrom(int n, GetPoint get) {
  Vec2 centroid = Vec2::Zero();
  for (int k = 0; k < n; ++k) centroid += get(k);
  centroid /= n;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) sq += (get(k) - centroid).squaredNorm();
  const double rms = std::sqrt(sq / n);
  const double scale = rms > 0.0 ? std::sqrt(2.0) / rms : 1.0;
  Mat3 T = Mat3::Identity();
  T(0, 0) = scale;
  T(1, 1) = scale;
  T(0, 2) = -scale * centroid.x();
  T(1, 2) = -scale * centroid.y();
  return T;
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, polished with Newton steps.
int SolveCubic(double c3, double c2, double c1, double c0, double roots[3]) {
  const double scale =
      std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0) return 0;
  int n = 0;
  if (std::abs(c3) < 1e-14 * scale) {
    if (std::abs(c2) < 1e-14 * scale) {
      if (c1 == 0.0) return 0;
      roots[n++] = -c0 / c1;
    } else {
      const double disc = c1 * c1 - 4.0 * c2 * c0;
      if (disc < 0.0) return 0;
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      roots[n++] = q / c2;
      if (q != 0.0) roots[n++] = c0 / q;
    }
  } else {
    const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    const double q3 = q * q * q;
    if (r * r < q3) {
      const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
      const double m = -2.0 * std::sqrt(q);
      roots[n++] = m * std::cos(theta / 3.0) - a / 3.0;
      roots[n++] = m * std::cos((theta + 2.0 * M_PI) / 3.0) - a / 3.0;
      roots[n++] = m * std::cos((theta - 2.0 * M_PI) / 3.0) - a / 3.0;
    } else {
      const double A =
          -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
      const double B = A != 0.0 ? q / A : 0.0;
      roots[n++] = (A + B) - a / 3.0;
    }
  }
  for (int k = 0; k < n; ++k) {
    double x = roots[k];
    for (int it = 0; it < 2; ++it) {
      const double p = ((c3 * x + c2) * x + c1) * x + c0;
      const double dp = (3.0 * c3 * x + 2.0 * c2) * x + c1;
      if (dp == 0.0) break;
      x -= p / dp;
    }
    roots[k] = x;
  }
  return n;
}

}  // namespace

Mat3 HartleyNormalization(std::span<const Vec2> points) {
  IMB_CHECK_ARG(!points.empty(), "no points to normalize");
  return NormalizationFrom(static_cast<int>(points.size()),
                           [&](int k) -> const Vec2& { return points[k]; });
}

namespace internal {

int SevenPointRaw(const std::array<PointPair, 7>& sample,
                  std::array<Mat3, 3>* models) {
  const Mat3 Ti = NormalizationFrom(7, [&](int k) { return sample[k].xi; });
  const Mat3 Tj = NormalizationFrom(7, [&](int k) { return sample[k].xj; });

  double A[7][9];
  for (int k = 0; k < 7; ++k) {
    const Row9 row = EpipolarRow(Apply(Ti, sample[k].xi), Apply(Tj, sample[k].xj));
    for (int c = 0; c < 9; ++c) A[k][c] = row(c);
  }
  // Gauss-Jordan elimination with full pivoting to A P = [I | B]; the
  // null space is then spanned by P [-B; I].
  int perm[9] = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  double first_pivot = 0.0;
  for (int r = 0; r < 7; ++r) {
    int pr = r, pc = r;
    double best = -1.0;
    for (int i = r; i < 7; ++i) {
      for (int c = r; c < 9; ++c) {
        if (std::abs(A[i][c]) > best) {
          best = std::abs(A[i][c]);
          pr = i;
          pc = c;
        }
      }
    }
    if (r == 0) first_pivot = best;
    if (!(best > 1e-10 * first_pivot)) return -1;
    if (pr != r) {
      for (int c = 0; c < 9; ++c) std::swap(A[r][c], A[pr][c]);
    }
    if (pc != r) {
      for (int i = 0; i < 7; ++i) std::swap(A[i][r], A[i][pc]);
      std::swap(perm[r], perm[pc]);
    }
    const double inv = 1.0 / A[r][r];
    for (int c = r; c < 9; ++c) A[r][c] *= inv;
    for (int i = 0; i < 7; ++i) {
      if (i == r) continue;
      const double f = A[i][r];
      if (f == 0.0) continue;
      for (int c = r; c < 9; ++c) A[i][c] -= f * A[r][c];
    }
  }
  Eigen::Matrix<double, 9, 1> n1, n2;
  for (int i = 0; i < 7; ++i) {
    n1(perm[i]) = -A[i][7];
    n2(perm[i]) = -A[i][8];
  }
  n1(perm[7]) = 1.0;
  n1(perm[8]) = 0.0;
  n2(perm[7]) = 0.0;
  n2(perm[8]) = 1.0;
  const Mat3 F1 = Unstack(n1);
  const Mat3 F2 = Unstack(n2);

  // det(F2 + x (F1 - F2)) sampled at x = 0, 1, -1, 2 gives the cubic.
  const Mat3 D = F1 - F2;
  const double p0 = F2.determinant();
  const double p1 = F1.determinant();
  const double pm1 = (F2 - D).determinant();
  const double p2 = (F2 + 2.0 * D).determinant();
  const double c0 = p0;
  const double c2 = 0.5 * (p1 + pm1) - c0;
  const double odd = 0.5 * (p1 - pm1);  // c3 + c1
  const double c3 = (p2 - c0 - 4.0 * c2 - 2.0 * odd) / 6.0;
  const double c1 = odd - c3;

  double roots[3];
  const int n = SolveCubic(c3, c2, c1, c0, roots);
  int count = 0;
  for (int k = 0; k < n; ++k) {
    const Mat3 Fn = F2 + roots[k] * D;
    Mat3 F = Tj.transpose() * Fn * Ti;
    const double norm = F.norm();
    if (!(norm > 0.0) || !F.allFinite()) continue;
    (*models)[count++] = F / norm;
  }
  return count;
}

}  // namespace internal

std::vector<FundamentalMatrix> SevenPoint(std::span<const PointPair> sample) {
  IMB_CHECK_ARG(sample.size() == 7, "seven-point solver needs 7 pairs");
  std::array<PointPair, 7> s;
  std::copy(sample.begin(), sample.end(), s.begin());
  std::array<Mat3, 3> models;
  const int n = internal::SevenPointRaw(s, &models);
  if (n < 0) Throw(ErrorCode::kDegenerateSample, "degenerate sample");
  std::vector<FundamentalMatrix> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(FundamentalMatrix::ProjectToRank2(models[k]));
  }
  return out;
}

namespace {

template <typename WeightFn>
FundamentalMatrix SolveEightPoint(std::span<const PointPair> pairs,
                                  WeightFn weight_of) {
  const int n = static_cast<int>(pairs.size());
  IMB_CHECK_ARG(n >= 8, "eight-point solver needs at least 8 pairs");
  const Mat3 Ti = NormalizationFrom(n, [&](int k) { return pairs[k].xi; });
  const Mat3 Tj = NormalizationFrom(n, [&](int k) { return pairs[k].xj; });

  Eigen::Matrix<double, Eigen::Dynamic, 9> A(n, 9);
  for (int k = 0; k < n; ++k) {
    const Vec2 xi = Apply(Ti, pairs[k].xi);
    const Vec2 xj = Apply(Tj, pairs[k].xj);
    A.row(k) = weight_of(k, xi, xj, Ti, Tj) * EpipolarRow(xi, xj);
  }
  if (!A.allFinite()) Throw(ErrorCode::kDegenerateSample, "degenerate sample");
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 9>> svd(
      A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(7) > 1e-10 * s(0))) {
    Throw(ErrorCode::kDegenerateSample, "degenerate sample");
  }
  const Mat3 Fn = Unstack(svd.matrixV().col(8));
  const Mat3 Fn2 = FundamentalMatrix::ProjectToRank2(Fn).matrix();
  return FundamentalMatrix::ProjectToRank2(Tj.transpose() * Fn2 * Ti);
}

}  // namespace

FundamentalMatrix EightPoint(std::span<const PointPair> pairs,
                             std::span<const double> weights) {
  IMB_CHECK_ARG(weights.empty() || weights.size() == pairs.size(),
                "one weight per pair");
  return SolveEightPoint(pairs, [&](int k, const Vec2&, const Vec2&,
                                    const Mat3&, const Mat3&) {
    return weights.empty() ? 1.0 : weights[k];
  });
}

FundamentalMatrix EightPointSampsonWeighted(std::span<const PointPair> pairs,
                                            const Mat3& reference) {
  Mat3 Fn;
  bool ready = false;
  return SolveEightPoint(pairs, [&](int, const Vec2& xi, const Vec2& xj,
                                    const Mat3& Ti, const Mat3& Tj) {
    if (!ready) {
      Fn = Tj.inverse().transpose() * reference * Ti.inverse();
      ready = true;
    }
    const Vec3 lj = Fn * xi.homogeneous();
    const Vec3 li = Fn.transpose() * xj.homogeneous();
    const double g = lj.head<2>().squaredNorm() + li.head<2>().squaredNorm();
    return g > 0.0 ? 1.0 / std::sqrt(g) : 1.0;
  });
}

}  // namespace imb
