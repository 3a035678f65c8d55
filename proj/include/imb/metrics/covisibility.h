#pragma once

#include <span>

#include "imb/geometry/types.h"

namespace imb {

// Bounding-box area of the observations over the image area, clamped to 1.
double ImageVisibility(std::span<const Vec2> observations, int width, int height);

// min of the two image visibilities; 0 without shared points.
double CoVisibility(std::span<const Vec2> obs_i, int width_i, int height_i,
                    std::span<const Vec2> obs_j, int width_j, int height_j);

}  // namespace imb
