#include "imb/geometry/residuals.h"

#include <cmath>
#include <limits>

namespace imb {
namespace {

struct EpipolarTerms {
  double algebraic;  // x_j^T F x_i
  double grad_j;     // squared gradient of the line in image j
  double grad_i;     // squared gradient of the line in image i
};

EpipolarTerms ComputeTerms(const Mat3& F, const Vec2& xi, const Vec2& xj) {
  const Vec3 hi = xi.homogeneous();
  const Vec3 hj = xj.homogeneous();
  const Vec3 line_j = F * hi;
  const Vec3 line_i = F.transpose() * hj;
  return {hj.dot(line_j), line_j.head<2>().squaredNorm(),
          line_i.head<2>().squaredNorm()};
}

}  // namespace

double SymmetricEpipolarDistance(const Mat3& F, const Vec2& xi,
                                 const Vec2& xj) {
  const EpipolarTerms t = ComputeTerms(F, xi, xj);
  if (t.grad_i == 0.0 || t.grad_j == 0.0) {
    return t.algebraic == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const double e2 = t.algebraic * t.algebraic;
  return std::sqrt(0.5 * (e2 / t.grad_j + e2 / t.grad_i));
}

double SampsonDistance(const Mat3& F, const Vec2& xi, const Vec2& xj) {
  const EpipolarTerms t = ComputeTerms(F, xi, xj);
  const double denom = t.grad_i + t.grad_j;
  if (denom == 0.0) {
    return t.algebraic == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(t.algebraic) / std::sqrt(denom);
}

double EpipolarResidual(ResidualKind kind, const Mat3& F, const Vec2& xi,
                        const Vec2& xj) {
  return kind == ResidualKind::kSampson ? SampsonDistance(F, xi, xj)
                                        : SymmetricEpipolarDistance(F, xi, xj);
}

}  // namespace imb
