#include "imb/io/pairs.h"

#include <algorithm>
#include <tuple>

#include "imb/util/error.h"
#include "imb/util/random.h"

namespace imb {

std::vector<io::PairEntry> EnumeratePairs(const SceneBundle& scene, double min_covisibility) {
  std::vector<io::PairEntry> out;
  for (const io::PairEntry& p : scene.pairs) {
    if (p.covisibility >= min_covisibility) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const io::PairEntry& a, const io::PairEntry& b) {
    return std::tie(a.image_i, a.image_j) < std::tie(b.image_i, b.image_j);
  });
  return out;
}

void BagSpec::Validate() const {
  IMB_CHECK_ARG(!sizes.empty() && sizes.size() == counts.size(),
                "bag sizes and counts must be non-empty and of equal length");
  for (size_t k = 0; k < sizes.size(); ++k) {
    IMB_CHECK_ARG(sizes[k] >= 2, "bag sizes must be at least 2");
    IMB_CHECK_ARG(k == 0 || sizes[k - 1] < sizes[k], "bag sizes must be ascending");
    IMB_CHECK_ARG(counts[k] > 0, "bag counts must be positive");
  }
}

std::map<int, std::vector<Bag>> SampleBags(const SceneBundle& scene, const BagSpec& spec,
                                           int min_points) {
  spec.Validate();
  const int n = static_cast<int>(scene.images.size());
  // Per image, the dense indices of the points it observes.
  std::vector<std::vector<int>> points_of(n);
  int num_points = 0;
  for (const auto& [point, entries] : scene.observations) {
    for (const io::ObservationEntry& e : entries) {
      const int idx = scene.ImageIndex(e.image_id);
      if (idx >= 0) points_of[idx].push_back(num_points);
    }
    ++num_points;
  }
  std::vector<int> multiplicity(num_points, 0);
  auto accept = [&](const std::vector<int>& subset) {
    for (const int im : subset) {
      for (const int p : points_of[im]) ++multiplicity[p];
    }
    bool ok = true;
    for (const int im : subset) {
      int shared = 0;
      for (const int p : points_of[im]) shared += multiplicity[p] >= 2;
      if (shared < min_points) {
        ok = false;
        break;
      }
    }
    for (const int im : subset) {
      for (const int p : points_of[im]) multiplicity[p] = 0;
    }
    return ok;
  };

  std::map<int, std::vector<Bag>> bags;
  for (size_t s = 0; s < spec.sizes.size(); ++s) {
    const int size = spec.sizes[s];
    if (size > n) {
      Throw(ErrorCode::kSampling, "bag size " + std::to_string(size) + " exceeds the " +
                                      std::to_string(n) + " images of scene " + scene.name);
    }
    Random rng(HashCombine(HashCombine(spec.seed, HashString(scene.name)), size));
    auto& out = bags[size];
    const int64_t max_attempts = int64_t(kBagAttemptsPerBag) * spec.counts[s];
    int64_t attempts = 0;
    while (static_cast<int>(out.size()) < spec.counts[s]) {
      if (attempts++ >= max_attempts) {
        Throw(ErrorCode::kSampling,
              "could not sample " + std::to_string(spec.counts[s]) + " bags of size " +
                  std::to_string(size) + " from scene " + scene.name + " (" +
                  std::to_string(out.size()) + " accepted in " +
                  std::to_string(max_attempts) + " attempts)");
      }
      std::vector<int> subset = rng.SampleWithoutReplacement(n, size);
      if (!accept(subset)) continue;
      std::sort(subset.begin(), subset.end());
      Bag bag;
      for (const int im : subset) bag.push_back(scene.images[im].id);
      out.push_back(std::move(bag));
    }
  }
  return bags;
}

}  // namespace imb
