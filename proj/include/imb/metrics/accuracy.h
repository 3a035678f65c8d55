#pragma once

#include <array>
#include <span>

namespace imb {

inline constexpr int kNumAccuracyThresholds = 10;  // 1..10 degrees

// A pose is accurate at threshold t when err < t - kThresholdSlackDeg, so
// errors that equal a threshold analytically are consistently excluded
// regardless of rounding in the angle formulas.
inline constexpr double kThresholdSlackDeg = 1e-9;

struct AccuracyCurve {
  std::array<double, kNumAccuracyThresholds> accuracy{};
  double mAA = 0.0;

  static double Threshold(int k) { return k + 1.0; }
  bool operator==(const AccuracyCurve&) const = default;
};

// Fraction of errors below each integer threshold; +inf never counts.
// Throws kNoPairs for an empty list.
AccuracyCurve ComputeAccuracyCurve(std::span<const double> errors_deg);

// Pointwise mean of curves (mAA is the mean of the member mAAs).
AccuracyCurve MeanCurve(std::span<const AccuracyCurve> curves);

}  // namespace imb
