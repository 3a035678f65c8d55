#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imb/harness/config.h"
#include "imb/harness/stereo.h"

namespace imb {

// Axes left empty take the base config's value.
struct SweepGrid {
  std::vector<double> ratios;
  std::vector<double> thresholds;  // eta
  std::vector<int64_t> max_iterations;  // Gamma
  std::vector<MatchingMode> modes;
};

struct SweepPoint {
  double ratio = 0.8;
  double threshold = 1.0;
  int64_t max_iterations = 250000;
  MatchingMode mode = MatchingMode::kBoth;

  // Stable identifier, also the last tie-breaker of the ranking.
  std::string Key() const;
  bool operator==(const SweepPoint&) const = default;
};

struct SweepEntry {
  SweepPoint point;
  double mAA = 0.0;
  double mean_inlier_ratio = 0.0;
  bool failed = false;  // the run threw; mAA is 0
  std::string failure;
  double mean_pair_seconds = 0.0;
};

struct SweepResult {
  // Best first: mAA descending, then mean pair time ascending, then key.
  std::vector<SweepEntry> ranked;
  const SweepEntry& best() const { return ranked.front(); }
};

std::vector<SweepPoint> ExpandGrid(const SweepGrid& grid, const RunConfig& base);

// Ranks entries in place per SweepResult::ranked.
void RankSweep(std::vector<SweepEntry>* entries);

// Runs every grid point. Matching results are shared between points that
// differ only in RANSAC settings unless `share_matches` is off.
SweepResult RunSweep(const RunConfig& base, const SweepGrid& grid, bool share_matches = true,
                     StereoCache* cache = nullptr);

}  // namespace imb
