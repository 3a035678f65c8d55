#pragma once

#include <string>

#include "imb/geometry/types.h"

namespace imb {

// Angle of R_est^T R_gt, degrees in [0, 180].
double RotationErrorDeg(const Mat3& R_est, const Mat3& R_gt);

// Angle between translation directions, degrees in [0, 180]; the sign of
// t is significant. Throws kPureRotation when |t_gt| < 1e-9.
double TranslationErrorDeg(const Vec3& t_est, const Vec3& t_gt);

inline constexpr double kPureRotationBaseline = 1e-9;

enum class ErrorCombination { kMax, kRotationOnly, kTranslationOnly };

std::string ErrorCombinationName(ErrorCombination mode);
ErrorCombination ParseErrorCombination(const std::string& name);

struct PairPoseError {
  double rotation_deg;
  double translation_deg;
  double combined_deg;  // +inf when estimation failed

  static PairPoseError Failed();
  bool failed() const;
  bool operator==(const PairPoseError&) const = default;
};

PairPoseError ComputePairPoseError(const Mat3& R_est, const Vec3& t_est,
                                   const Mat3& R_gt, const Vec3& t_gt,
                                   ErrorCombination mode = ErrorCombination::kMax);

}  // namespace imb
