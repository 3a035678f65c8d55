#include "imb/metrics/pose_error.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imb/util/error.h"

namespace imb {
namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

}  // namespace

double RotationErrorDeg(const Mat3& R_est, const Mat3& R_gt) {
  const Mat3 D = R_est.transpose() * R_gt;
  // atan2 of (sin, cos) of the rotation angle; equal to
  // acos((trace - 1) / 2) but accurate near 0 and 180 degrees.
  const double cos_angle = std::clamp(0.5 * (D.trace() - 1.0), -1.0, 1.0);
  const Vec3 axis(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
  const double sin_angle = std::min(1.0, 0.5 * axis.norm());
  return std::atan2(sin_angle, cos_angle) * kRadToDeg;
}

double TranslationErrorDeg(const Vec3& t_est, const Vec3& t_gt) {
  if (!(t_gt.norm() >= kPureRotationBaseline)) {
    Throw(ErrorCode::kPureRotation, "pure rotation pair");
  }
  IMB_CHECK_ARG(t_est.norm() > 0.0, "estimated translation is zero");
  const Vec3 a = t_est.normalized();
  const Vec3 b = t_gt.normalized();
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kRadToDeg;
}

std::string ErrorCombinationName(ErrorCombination mode) {
  switch (mode) {
    case ErrorCombination::kMax: return "max";
    case ErrorCombination::kRotationOnly: return "rotation";
    case ErrorCombination::kTranslationOnly: return "translation";
  }
  return "?";
}

ErrorCombination ParseErrorCombination(const std::string& name) {
  if (name == "max") return ErrorCombination::kMax;
  if (name == "rotation") return ErrorCombination::kRotationOnly;
  if (name == "translation") return ErrorCombination::kTranslationOnly;
  Throw(ErrorCode::kInvalidArgument, "unknown error combination: " + name);
}

PairPoseError PairPoseError::Failed() {
  const double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, inf};
}

bool PairPoseError::failed() const { return std::isinf(combined_deg); }

PairPoseError ComputePairPoseError(const Mat3& R_est, const Vec3& t_est,
                                   const Mat3& R_gt, const Vec3& t_gt,
                                   ErrorCombination mode) {
  PairPoseError e;
  e.rotation_deg = RotationErrorDeg(R_est, R_gt);
  e.translation_deg = TranslationErrorDeg(t_est, t_gt);
  switch (mode) {
    case ErrorCombination::kMax:
      e.combined_deg = std::max(e.rotation_deg, e.translation_deg);
      break;
    case ErrorCombination::kRotationOnly:
      e.combined_deg = e.rotation_deg;
      break;
    case ErrorCombination::kTranslationOnly:
      e.combined_deg = e.translation_deg;
      break;
  }
  return e;
}

}  // namespace imb
