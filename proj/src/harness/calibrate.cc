#include "imb/harness/calibrate.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "imb/util/error.h"

namespace imb {

int64_t SuggestIterations(double target_seconds, double seconds_per_iteration) {
  IMB_CHECK_ARG(target_seconds > 0.0 && std::isfinite(target_seconds),
                "target seconds must be positive");
  IMB_CHECK_ARG(seconds_per_iteration > 0.0 && std::isfinite(seconds_per_iteration),
                "per-iteration cost must be positive");
  const double raw = target_seconds / seconds_per_iteration;
  const double rounded = std::round(raw / 1000.0) * 1000.0;
  const double clamped = std::clamp(rounded, double(kMinSuggestedIterations),
                                    double(kMaxSuggestedIterations));
  return static_cast<int64_t>(clamped);
}

BudgetCalibration CalibrateBudget(double target_seconds,
                                  std::span<const std::vector<PointPair>> sample_pairs,
                                  const RansacConfig& config) {
  IMB_CHECK_ARG(!sample_pairs.empty(), "need at least one sample pair");
  RansacConfig cfg = config;
  cfg.max_iterations = kCalibrationIterations;
  BudgetCalibration out;
  double seconds = 0.0;
  for (size_t p = 0; p < sample_pairs.size(); ++p) {
    cfg.seed = config.seed + p;
    const auto start = std::chrono::steady_clock::now();
    try {
      out.iterations_measured += EstimateFundamental(sample_pairs[p], cfg).iterations;
    } catch (const Error& e) {
      // No model reached the minimum support, so the cap was exhausted.
      if (e.code() != ErrorCode::kEstimationFailed) throw;
      out.iterations_measured += cfg.max_iterations;
    }
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++out.num_pairs;
  }
  out.seconds_per_iteration = seconds / std::max<int64_t>(1, out.iterations_measured);
  out.suggested_max_iterations = SuggestIterations(target_seconds, out.seconds_per_iteration);
  return out;
}

}  // namespace imb
