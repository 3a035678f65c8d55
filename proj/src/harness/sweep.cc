#include "imb/harness/sweep.h"

#include <algorithm>
#include <tuple>

#include "imb/util/error.h"
#include "imb/util/text_io.h"

namespace imb {

std::string SweepPoint::Key() const {
  return "mode=" + MatchingModeName(mode) + ";ratio=" + FormatDouble(ratio) +
         ";eta=" + FormatDouble(threshold) + ";gamma=" + std::to_string(max_iterations);
}

std::vector<SweepPoint> ExpandGrid(const SweepGrid& grid, const RunConfig& base) {
  const std::vector<double> ratios =
      grid.ratios.empty() ? std::vector<double>{base.matching.ratio} : grid.ratios;
  const std::vector<double> thresholds =
      grid.thresholds.empty() ? std::vector<double>{base.ransac.threshold} : grid.thresholds;
  const std::vector<int64_t> iterations =
      grid.max_iterations.empty() ? std::vector<int64_t>{base.ransac.max_iterations}
                                  : grid.max_iterations;
  const std::vector<MatchingMode> modes =
      grid.modes.empty() ? std::vector<MatchingMode>{base.matching.mode} : grid.modes;
  std::vector<SweepPoint> points;
  for (const MatchingMode mode : modes) {
    for (const double ratio : ratios) {
      for (const double threshold : thresholds) {
        for (const int64_t gamma : iterations) {
          points.push_back({ratio, threshold, gamma, mode});
        }
      }
    }
  }
  return points;
}

void RankSweep(std::vector<SweepEntry>* entries) {
  std::stable_sort(entries->begin(), entries->end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     if (a.mAA != b.mAA) return a.mAA > b.mAA;
                     if (a.mean_pair_seconds != b.mean_pair_seconds) {
                       return a.mean_pair_seconds < b.mean_pair_seconds;
                     }
                     return a.point.Key() < b.point.Key();
                   });
}

SweepResult RunSweep(const RunConfig& base, const SweepGrid& grid, bool share_matches,
                     StereoCache* cache) {
  const std::vector<SweepPoint> points = ExpandGrid(grid, base);
  StereoCache local_cache;
  StereoCache& store = cache != nullptr ? *cache : local_cache;
  const bool previous = store.match_caching();
  store.set_match_caching(share_matches);
  SweepResult result;
  for (const SweepPoint& point : points) {
    RunConfig cfg = base;
    cfg.matching.ratio = point.ratio;
    cfg.matching.mode = point.mode;
    cfg.ransac.threshold = point.threshold;
    cfg.ransac.max_iterations = point.max_iterations;
    SweepEntry entry;
    entry.point = point;
    try {
      const StereoReport report = RunStereo(cfg, &store);
      entry.mAA = report.overall.mAA;
      entry.mean_inlier_ratio = report.mean_inlier_ratio;
      entry.mean_pair_seconds = report.timings.MeanPairSeconds();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kValidation) throw;
      entry.failed = true;
      entry.failure = e.what();
    }
    result.ranked.push_back(std::move(entry));
  }
  store.set_match_caching(previous);
  RankSweep(&result.ranked);
  return result;
}

}  // namespace imb
