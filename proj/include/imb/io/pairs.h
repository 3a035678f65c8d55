#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "imb/io/scene.h"

namespace imb {

// Unordered pairs with co-visibility >= min_covisibility, sorted by
// (image_i, image_j).
std::vector<io::PairEntry> EnumeratePairs(const SceneBundle& scene, double min_covisibility);

struct BagSpec {
  std::vector<int> sizes{5, 10, 25};
  std::vector<int> counts{100, 50, 25};
  uint64_t seed = 0;

  void Validate() const;
  bool operator==(const BagSpec&) const = default;
};

using Bag = std::vector<std::string>;  // sorted image ids

inline constexpr int kDefaultBagMinPoints = 100;
inline constexpr int kBagAttemptsPerBag = 10000;

// Seeded rejection sampling of co-visible bags: a uniformly drawn subset is
// accepted when each member observes at least `min_points` points that at
// least two members observe. Throws kSampling naming the size that could
// not be filled within the attempt bound.
std::map<int, std::vector<Bag>> SampleBags(const SceneBundle& scene, const BagSpec& spec,
                                           int min_points = kDefaultBagMinPoints);

}  // namespace imb
