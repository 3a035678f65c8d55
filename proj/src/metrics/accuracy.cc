#include "imb/metrics/accuracy.h"

#include "imb/util/error.h"

namespace imb {

AccuracyCurve ComputeAccuracyCurve(std::span<const double> errors_deg) {
  if (errors_deg.empty()) Throw(ErrorCode::kNoPairs, "no pairs");
  AccuracyCurve curve;
  for (int k = 0; k < kNumAccuracyThresholds; ++k) {
    const double t = AccuracyCurve::Threshold(k) - kThresholdSlackDeg;
    int hits = 0;
    for (const double e : errors_deg) {
      if (e < t) ++hits;
    }
    curve.accuracy[k] = static_cast<double>(hits) / errors_deg.size();
  }
  double sum = 0.0;
  for (const double a : curve.accuracy) sum += a;
  curve.mAA = sum / kNumAccuracyThresholds;
  return curve;
}

AccuracyCurve MeanCurve(std::span<const AccuracyCurve> curves) {
  if (curves.empty()) Throw(ErrorCode::kNoPairs, "no curves to average");
  AccuracyCurve out;
  for (const AccuracyCurve& c : curves) {
    for (int k = 0; k < kNumAccuracyThresholds; ++k) {
      out.accuracy[k] += c.accuracy[k];
    }
    out.mAA += c.mAA;
  }
  for (double& a : out.accuracy) a /= curves.size();
  out.mAA /= curves.size();
  return out;
}

}  // namespace imb
