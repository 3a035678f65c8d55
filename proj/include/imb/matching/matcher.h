#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imb/matching/features.h"

namespace imb {

// Which image supplied the queries, or how two directed lists were merged.
enum class MatchDirection { kIToJ, kJToI, kBoth, kEither };

std::string MatchDirectionName(MatchDirection direction);

struct Match {
  int index_i = 0;  // keypoint in image i
  int index_j = 0;  // keypoint in image j
  double distance = 0.0;
  std::optional<double> second_distance;

  bool operator==(const Match&) const = default;
};

struct MatchList {
  MatchDirection direction = MatchDirection::kIToJ;
  std::vector<Match> entries;
  // Applied stages in order, e.g. {"nn", ""}, {"ratio", "0.8"}.
  std::vector<std::pair<std::string, std::string>> provenance;

  // Single-line rendering of `provenance`, e.g. "nn;ratio=0.8".
  std::string ProvenanceString() const;
  bool operator==(const MatchList&) const = default;
};

// Exhaustive nearest / second-nearest neighbour search. Queries come from
// d_i for kIToJ and from d_j for kJToI; entries always store (index_i,
// index_j). Ties go to the lower target index.
MatchList NnMatch(const DescriptorSet& d_i, const DescriptorSet& d_j,
                  MatchDirection direction = MatchDirection::kIToJ);

// Lowe's ratio test: keep distance / second_distance <= ratio (0/0 := 0).
MatchList RatioFilter(const MatchList& matches, double ratio);

// Full distance ranking of one query against all targets, computed on
// demand so the matcher never stores an N x M table.
class NeighborRanking {
 public:
  NeighborRanking(const DescriptorSet& queries, const DescriptorSet& targets)
      : queries_(queries), targets_(targets) {}

  double Distance(int query, int target) const {
    return queries_.Distance(query, targets_, target);
  }
  // (distance, target) sorted ascending, ties by target index.
  std::vector<std::pair<double, int>> Ranked(int query) const;
  int num_targets() const { return targets_.count(); }

 private:
  const DescriptorSet& queries_;
  const DescriptorSet& targets_;
};

// First-geometrically-inconsistent-neighbour ratio test on a directed list.
// The ratio denominator is the best-ranked target, other than the nearest
// neighbour itself, whose keypoint lies at least `min_geom_dist` pixels from
// the nearest neighbour's keypoint. Without such a target the match is kept.
// `target_keypoints` belong to the target image of `matches.direction`.
MatchList FginnFilter(const MatchList& matches, const DescriptorSet& d_i,
                      const DescriptorSet& d_j,
                      const KeypointList& target_keypoints, double ratio,
                      double min_geom_dist = 10.0);

enum class SymmetrizeMode { kBoth, kEither };

// kBoth: mutual matches. kEither: union deduplicated on (index_i, index_j),
// keeping the smaller distance. Output is sorted by (index_i, index_j).
MatchList Symmetrize(const MatchList& m_ij, const MatchList& m_ji,
                     SymmetrizeMode mode);

MatchList DistanceFilter(const MatchList& matches, double max_dist);

struct TruncatedFeatures {
  KeypointList keypoints;
  DescriptorSet descriptors;
  std::vector<int> kept;  // original indices, ascending
};

// Keeps the `budget` highest-score keypoints (ties by lower index), in their
// original order.
TruncatedFeatures TruncateTopK(const KeypointList& keypoints,
                               const DescriptorSet& descriptors, int budget);

// Throws kValidation unless the list satisfies its invariants.
void ValidateMatchList(const MatchList& matches);

}  // namespace imb
