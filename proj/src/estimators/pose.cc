#include "imb/estimators/pose.h"

#include <vector>

#include "imb/geometry/essential.h"

namespace imb {

PoseEstimate EstimatePoseFromMatches(std::span<const PointPair> matches,
                                     const CameraModel& cam_i,
                                     const CameraModel& cam_j,
                                     const RansacConfig& config) {
  cam_i.Validate();
  cam_j.Validate();
  PoseEstimate out;
  out.model = EstimateFundamental(matches, config);
  const EssentialMatrix E = ComposeEssential(out.model.F, cam_i, cam_j);
  std::vector<PointPair> normalized;
  normalized.reserve(out.model.num_inliers);
  for (size_t k = 0; k < matches.size(); ++k) {
    if (!out.model.inlier_mask[k]) continue;
    normalized.push_back(
        {cam_i.Normalize(matches[k].xi), cam_j.Normalize(matches[k].xj)});
  }
  const CheiralityResult chosen =
      SelectCheirality(DecomposeEssential(E), normalized);
  out.pose = chosen.pose;
  out.num_in_front = chosen.num_in_front;
  return out;
}

}  // namespace imb
