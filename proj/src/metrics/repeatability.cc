#include "imb/metrics/repeatability.h"

#include <limits>
#include <set>
#include <utility>

#include "imb/geometry/depth.h"

namespace imb {
namespace {

struct DirectionCounts {
  int valid = 0;
  int repeated = 0;
  int matched = 0;
};

// Keypoints of `from` reprojected into `to`; `is_match(a, b)` tests whether
// (a in from, b in to) is a final match.
template <typename IsMatch>
DirectionCounts CountDirection(const KeypointList& from, const KeypointList& to,
                               const CameraModel& cam_from, const DepthMap& depth_from,
                               const CameraModel& cam_to, const DepthMap& depth_to,
                               double px_threshold, IsMatch is_match) {
  DirectionCounts counts;
  const double thr2 = px_threshold * px_threshold;
  for (size_t a = 0; a < from.size(); ++a) {
    const auto proj = ReprojectVisible(Vec2(from[a].x, from[a].y), cam_from,
                                       depth_from, cam_to, depth_to);
    if (!proj) continue;
    ++counts.valid;
    double best = std::numeric_limits<double>::infinity();
    size_t best_b = 0;
    for (size_t b = 0; b < to.size(); ++b) {
      const double dx = to[b].x - proj->pixel.x();
      const double dy = to[b].y - proj->pixel.y();
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_b = b;
      }
    }
    if (best <= thr2) {
      ++counts.repeated;
      if (is_match(a, best_b)) ++counts.matched;
    }
  }
  return counts;
}

std::optional<double> Combine(const DirectionCounts& ij, const DirectionCounts& ji,
                              int DirectionCounts::*field) {
  std::vector<double> ratios;
  if (ij.valid > 0) ratios.push_back(static_cast<double>(ij.*field) / ij.valid);
  if (ji.valid > 0) ratios.push_back(static_cast<double>(ji.*field) / ji.valid);
  if (ratios.empty()) return std::nullopt;
  double sum = 0.0;
  for (const double r : ratios) sum += r;
  return sum / ratios.size();
}

std::pair<DirectionCounts, DirectionCounts> CountBoth(
    const RepeatabilityInput& in, const std::set<std::pair<int, int>>& pairs,
    double px_threshold) {
  const DirectionCounts ij = CountDirection(
      *in.keypoints_i, *in.keypoints_j, *in.cam_i, *in.depth_i, *in.cam_j,
      *in.depth_j, px_threshold, [&](size_t a, size_t b) {
        return pairs.count({static_cast<int>(a), static_cast<int>(b)}) > 0;
      });
  const DirectionCounts ji = CountDirection(
      *in.keypoints_j, *in.keypoints_i, *in.cam_j, *in.depth_j, *in.cam_i,
      *in.depth_i, px_threshold, [&](size_t b, size_t a) {
        return pairs.count({static_cast<int>(a), static_cast<int>(b)}) > 0;
      });
  return {ij, ji};
}

}  // namespace

std::optional<double> Repeatability(const RepeatabilityInput& in, double px_threshold) {
  const auto [ij, ji] = CountBoth(in, {}, px_threshold);
  return Combine(ij, ji, &DirectionCounts::repeated);
}

std::optional<double> MatchingScore(const RepeatabilityInput& in,
                                    const MatchList& matches, double px_threshold) {
  std::set<std::pair<int, int>> pairs;
  for (const Match& m : matches.entries) pairs.insert({m.index_i, m.index_j});
  const auto [ij, ji] = CountBoth(in, pairs, px_threshold);
  return Combine(ij, ji, &DirectionCounts::matched);
}

}  // namespace imb
