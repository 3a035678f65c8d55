#include "imb/matching/matcher.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "imb/util/error.h"
#include "imb/util/text_io.h"

namespace imb {
namespace {

bool IsDirected(MatchDirection d) {
  return d == MatchDirection::kIToJ || d == MatchDirection::kJToI;
}

int QueryIndex(const Match& m, MatchDirection d) {
  return d == MatchDirection::kJToI ? m.index_j : m.index_i;
}

int TargetIndex(const Match& m, MatchDirection d) {
  return d == MatchDirection::kJToI ? m.index_i : m.index_j;
}

bool PassesRatio(double distance, double denominator, double ratio) {
  if (denominator == 0.0) return distance == 0.0;  // 0/0 := 0
  return distance / denominator <= ratio;
}

bool PairLess(const Match& a, const Match& b) {
  return a.index_i != b.index_i ? a.index_i < b.index_i : a.index_j < b.index_j;
}

}  // namespace

std::string MatchDirectionName(MatchDirection direction) {
  switch (direction) {
    case MatchDirection::kIToJ: return "i->j";
    case MatchDirection::kJToI: return "j->i";
    case MatchDirection::kBoth: return "both";
    case MatchDirection::kEither: return "either";
  }
  return "?";
}

std::string MatchList::ProvenanceString() const {
  std::string out;
  for (const auto& [stage, param] : provenance) {
    if (!out.empty()) out += ';';
    out += stage;
    if (!param.empty()) out += "=" + param;
  }
  return out;
}

MatchList NnMatch(const DescriptorSet& d_i, const DescriptorSet& d_j,
                  MatchDirection direction) {
  IMB_CHECK_ARG(IsDirected(direction), "nn_match needs a directed list");
  if (d_i.kind() != d_j.kind()) {
    Throw(ErrorCode::kInvalidArgument, "descriptor metric mismatch");
  }
  if (d_i.dim() != d_j.dim()) {
    Throw(ErrorCode::kInvalidArgument, "descriptor dimension mismatch");
  }
  const bool forward = direction == MatchDirection::kIToJ;
  const DescriptorSet& queries = forward ? d_i : d_j;
  const DescriptorSet& targets = forward ? d_j : d_i;
  if (targets.count() < 2) {
    Throw(ErrorCode::kInvalidArgument,
          "nn_match needs at least 2 target descriptors");
  }
  MatchList out;
  out.direction = direction;
  out.provenance.emplace_back(
      "nn", forward ? "i->j" : "j->i");
  out.entries.reserve(queries.count());
  for (int q = 0; q < queries.count(); ++q) {
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int t = 0; t < targets.count(); ++t) {
      const double d = queries.Distance(q, targets, t);
      if (d < best) {
        second = best;
        best = d;
        best_index = t;
      } else if (d < second) {
        second = d;
      }
    }
    Match m;
    m.index_i = forward ? q : best_index;
    m.index_j = forward ? best_index : q;
    m.distance = best;
    m.second_distance = second;
    out.entries.push_back(m);
  }
  return out;
}

MatchList RatioFilter(const MatchList& matches, double ratio) {
  IMB_CHECK_ARG(ratio >= 0.0 && ratio <= 1.0, "ratio must be in [0, 1]");
  MatchList out;
  out.direction = matches.direction;
  out.provenance = matches.provenance;
  out.provenance.emplace_back("ratio", FormatDouble(ratio));
  for (const Match& m : matches.entries) {
    if (!m.second_distance) {
      Throw(ErrorCode::kInvalidArgument,
            "ratio test needs second-neighbour distances");
    }
    if (PassesRatio(m.distance, *m.second_distance, ratio)) {
      out.entries.push_back(m);
    }
  }
  return out;
}

std::vector<std::pair<double, int>> NeighborRanking::Ranked(int query) const {
  std::vector<std::pair<double, int>> ranked(targets_.count());
  for (int t = 0; t < targets_.count(); ++t) ranked[t] = {Distance(query, t), t};
  std::sort(ranked.begin(), ranked.end());
  return ranked;
}

MatchList FginnFilter(const MatchList& matches, const DescriptorSet& d_i,
                      const DescriptorSet& d_j,
                      const KeypointList& target_keypoints, double ratio,
                      double min_geom_dist) {
  IMB_CHECK_ARG(IsDirected(matches.direction), "FGINN needs a directed list");
  IMB_CHECK_ARG(ratio >= 0.0 && ratio <= 1.0, "ratio must be in [0, 1]");
  IMB_CHECK_ARG(min_geom_dist >= 0.0, "min_geom_dist must be >= 0");
  const bool forward = matches.direction == MatchDirection::kIToJ;
  const DescriptorSet& queries = forward ? d_i : d_j;
  const DescriptorSet& targets = forward ? d_j : d_i;
  IMB_CHECK_ARG(static_cast<int>(target_keypoints.size()) == targets.count(),
                "target keypoints do not match target descriptors");
  const NeighborRanking ranking(queries, targets);
  const double min_sq = min_geom_dist * min_geom_dist;

  MatchList out;
  out.direction = matches.direction;
  out.provenance = matches.provenance;
  out.provenance.emplace_back(
      "fginn", FormatDouble(ratio) + "@" + FormatDouble(min_geom_dist));
  for (const Match& m : matches.entries) {
    const int q = QueryIndex(m, matches.direction);
    const int nn = TargetIndex(m, matches.direction);
    const Keypoint& anchor = target_keypoints[nn];
    double denominator = std::numeric_limits<double>::infinity();
    for (int t = 0; t < ranking.num_targets(); ++t) {
      if (t == nn) continue;
      const double dx = target_keypoints[t].x - anchor.x;
      const double dy = target_keypoints[t].y - anchor.y;
      if (dx * dx + dy * dy < min_sq) continue;
      denominator = std::min(denominator, ranking.Distance(q, t));
    }
    Match kept = m;
    if (std::isinf(denominator)) {
      kept.second_distance.reset();
      out.entries.push_back(kept);
      continue;
    }
    kept.second_distance = denominator;
    if (PassesRatio(m.distance, denominator, ratio)) out.entries.push_back(kept);
  }
  return out;
}

MatchList Symmetrize(const MatchList& m_ij, const MatchList& m_ji,
                     SymmetrizeMode mode) {
  if (m_ij.direction != MatchDirection::kIToJ ||
      m_ji.direction != MatchDirection::kJToI) {
    Throw(ErrorCode::kInvalidArgument,
          "symmetrize needs an i->j list and a j->i list");
  }
  MatchList out;
  out.direction = mode == SymmetrizeMode::kBoth ? MatchDirection::kBoth
                                                : MatchDirection::kEither;
  out.provenance = m_ij.provenance;
  out.provenance.emplace_back("symmetrize",
                              mode == SymmetrizeMode::kBoth ? "both" : "either");

  std::vector<Match> backward = m_ji.entries;
  std::sort(backward.begin(), backward.end(), PairLess);
  auto find_backward = [&](const Match& m) -> const Match* {
    const auto it =
        std::lower_bound(backward.begin(), backward.end(), m, PairLess);
    if (it != backward.end() && it->index_i == m.index_i &&
        it->index_j == m.index_j) {
      return &*it;
    }
    return nullptr;
  };

  if (mode == SymmetrizeMode::kBoth) {
    for (const Match& m : m_ij.entries) {
      if (find_backward(m)) out.entries.push_back(m);
    }
  } else {
    std::vector<Match> merged = m_ij.entries;
    merged.insert(merged.end(), m_ji.entries.begin(), m_ji.entries.end());
    // Stable sort keeps the i->j entry first among equal pairs.
    std::stable_sort(merged.begin(), merged.end(), PairLess);
    for (const Match& m : merged) {
      if (!out.entries.empty() && out.entries.back().index_i == m.index_i &&
          out.entries.back().index_j == m.index_j) {
        if (m.distance < out.entries.back().distance) out.entries.back() = m;
        continue;
      }
      out.entries.push_back(m);
    }
  }
  std::sort(out.entries.begin(), out.entries.end(), PairLess);
  return out;
}

MatchList DistanceFilter(const MatchList& matches, double max_dist) {
  MatchList out;
  out.direction = matches.direction;
  out.provenance = matches.provenance;
  out.provenance.emplace_back("distance", FormatDouble(max_dist));
  for (const Match& m : matches.entries) {
    if (m.distance <= max_dist) out.entries.push_back(m);
  }
  return out;
}

TruncatedFeatures TruncateTopK(const KeypointList& keypoints,
                               const DescriptorSet& descriptors, int budget) {
  IMB_CHECK_ARG(budget >= 1, "feature budget must be >= 1");
  IMB_CHECK_ARG(static_cast<int>(keypoints.size()) == descriptors.count(),
                "keypoint and descriptor counts differ");
  const int n = static_cast<int>(keypoints.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (n > budget) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return keypoints[a].score > keypoints[b].score;
    });
    order.resize(budget);
    std::sort(order.begin(), order.end());
  }
  TruncatedFeatures out;
  out.kept = order;
  out.keypoints.reserve(order.size());
  for (const int k : order) out.keypoints.push_back(keypoints[k]);
  out.descriptors =
      n > budget ? descriptors.SelectRows(order) : descriptors;
  return out;
}

void ValidateMatchList(const MatchList& matches) {
  std::set<int> seen_i, seen_j;
  std::set<std::pair<int, int>> seen;
  for (size_t k = 0; k < matches.entries.size(); ++k) {
    const Match& m = matches.entries[k];
    auto fail = [&](const char* what) {
      Throw(ErrorCode::kValidation,
            "match " + std::to_string(k) + ": " + what);
    };
    if (m.index_i < 0 || m.index_j < 0) fail("negative index");
    if (!(m.distance >= 0.0)) fail("negative distance");
    if (m.second_distance && !(m.distance <= *m.second_distance)) {
      fail("distance exceeds second distance");
    }
    switch (matches.direction) {
      case MatchDirection::kIToJ:
        if (!seen_i.insert(m.index_i).second) fail("repeated query index");
        break;
      case MatchDirection::kJToI:
        if (!seen_j.insert(m.index_j).second) fail("repeated query index");
        break;
      case MatchDirection::kBoth:
        if (!seen_i.insert(m.index_i).second ||
            !seen_j.insert(m.index_j).second) {
          fail("not one-to-one");
        }
        break;
      case MatchDirection::kEither:
        if (!seen.insert({m.index_i, m.index_j}).second) fail("duplicate pair");
        break;
    }
  }
}

}  // namespace imb
