#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imb/estimators/fundamental_ransac.h"
#include "imb/geometry/types.h"

namespace imb {

inline constexpr int64_t kCalibrationIterations = 1000;  // Gamma_0
inline constexpr int64_t kMinSuggestedIterations = 1000;
inline constexpr int64_t kMaxSuggestedIterations = 1000000;

// target / cost rounded to the nearest 1000, clamped to
// [kMinSuggestedIterations, kMaxSuggestedIterations].
int64_t SuggestIterations(double target_seconds, double seconds_per_iteration);

struct BudgetCalibration {
  double seconds_per_iteration = 0.0;
  int64_t iterations_measured = 0;
  int num_pairs = 0;
  int64_t suggested_max_iterations = 0;
};

// Times estimation capped at Gamma_0 on each sample pair and divides the
// total time by the iterations executed. Throws kInvalidArgument without
// sample pairs.
BudgetCalibration CalibrateBudget(double target_seconds,
                                  std::span<const std::vector<PointPair>> sample_pairs,
                                  const RansacConfig& config);

}  // namespace imb
