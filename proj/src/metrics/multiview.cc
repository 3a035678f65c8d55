#include "imb/metrics/multiview.h"

#include "imb/metrics/alignment.h"
#include "imb/util/error.h"

namespace imb {

BagScore ScoreBag(const Reconstruction& estimated,
                  const Reconstruction& ground_truth,
                  const std::vector<std::string>& bag,
                  ErrorCombination mode) {
  IMB_CHECK_ARG(bag.size() >= 2, "bags need at least 2 images");
  for (const std::string& id : bag) {
    if (!ground_truth.count(id)) {
      Throw(ErrorCode::kInvalidArgument, "bag image " + id + " has no ground truth");
    }
  }
  BagScore score;
  std::vector<double> errors;
  std::vector<Vec3> est_centers, gt_centers;
  for (const std::string& id : bag) {
    const auto it = estimated.find(id);
    if (it == estimated.end()) continue;
    ++score.num_registered;
    est_centers.push_back(it->second.Center());
    gt_centers.push_back(ground_truth.at(id).Center());
  }
  for (size_t a = 0; a < bag.size(); ++a) {
    for (size_t b = a + 1; b < bag.size(); ++b) {
      const CameraPose& ga = ground_truth.at(bag[a]);
      const CameraPose& gb = ground_truth.at(bag[b]);
      const Mat3 R_gt = gb.rotation * ga.rotation.transpose();
      const Vec3 t_gt = gb.translation - R_gt * ga.translation;
      if (t_gt.norm() < kPureRotationBaseline) {
        ++score.num_excluded_pairs;
        continue;
      }
      const auto ea = estimated.find(bag[a]);
      const auto eb = estimated.find(bag[b]);
      if (ea == estimated.end() || eb == estimated.end()) {
        errors.push_back(PairPoseError::Failed().combined_deg);
        continue;
      }
      const Mat3 R_est = eb->second.rotation * ea->second.rotation.transpose();
      const Vec3 t_est = eb->second.translation - R_est * ea->second.translation;
      if (t_est.norm() == 0.0) {
        errors.push_back(PairPoseError::Failed().combined_deg);
        continue;
      }
      errors.push_back(
          ComputePairPoseError(R_est, t_est, R_gt, t_gt, mode).combined_deg);
    }
  }
  score.num_pairs = static_cast<int>(errors.size());
  if (!errors.empty()) score.curve = ComputeAccuracyCurve(errors);
  score.ate = AbsoluteTrajectoryError(est_centers, gt_centers);
  return score;
}

MultiviewAggregate AggregateBags(
    const std::map<int, std::vector<BagScore>>& scores_by_size) {
  MultiviewAggregate out;
  std::vector<AccuracyCurve> size_curves;
  std::vector<double> size_ates;
  for (const auto& [size, scores] : scores_by_size) {
    if (scores.empty()) continue;
    std::vector<AccuracyCurve> curves;
    double ate_sum = 0.0;
    int ate_count = 0;
    for (const BagScore& s : scores) {
      curves.push_back(s.curve);
      if (s.ate) {
        ate_sum += *s.ate;
        ++ate_count;
      }
    }
    out.per_size[size] = MeanCurve(curves);
    size_curves.push_back(out.per_size[size]);
    if (ate_count > 0) {
      out.ate_per_size[size] = ate_sum / ate_count;
      size_ates.push_back(ate_sum / ate_count);
    } else {
      out.ate_per_size[size] = std::nullopt;
    }
  }
  if (!size_curves.empty()) out.overall = MeanCurve(size_curves);
  if (!size_ates.empty()) {
    double sum = 0.0;
    for (const double a : size_ates) sum += a;
    out.ate = sum / size_ates.size();
  }
  return out;
}

}  // namespace imb
