#include "imb/metrics/covisibility.h"

#include <algorithm>

namespace imb {

double ImageVisibility(std::span<const Vec2> observations, int width, int height) {
  if (observations.empty() || width <= 0 || height <= 0) return 0.0;
  Vec2 lo = observations[0];
  Vec2 hi = observations[0];
  for (const Vec2& p : observations) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double area = (hi.x() - lo.x()) * (hi.y() - lo.y());
  return std::clamp(area / (static_cast<double>(width) * height), 0.0, 1.0);
}

double CoVisibility(std::span<const Vec2> obs_i, int width_i, int height_i,
                    std::span<const Vec2> obs_j, int width_j, int height_j) {
  if (obs_i.empty() || obs_j.empty()) return 0.0;
  return std::min(ImageVisibility(obs_i, width_i, height_i),
                  ImageVisibility(obs_j, width_j, height_j));
}

}  // namespace imb
