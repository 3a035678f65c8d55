#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "imb/geometry/types.h"
#include "imb/matching/features.h"
#include "imb/matching/matcher.h"
#include "imb/metrics/multiview.h"

// Parsers take the file contents plus the path used in error locations and
// throw FormatError on any malformed or invariant-violating input.
// Serializers produce the canonical bytes; Parse(Serialize(x)) == x.
namespace imb::io {

inline constexpr uint32_t kDescriptorFormatVersion = 1;

// "w h" / K rows / R rows / t.
std::string SerializeCalibration(const CameraModel& camera);
CameraModel ParseCalibration(std::string_view text, const std::string& path);

// "x y scale orientation score" per keypoint.
std::string SerializeKeypoints(const KeypointList& keypoints);
KeypointList ParseKeypoints(std::string_view text, const std::string& path);

// "DESC", u32 version, u32 count, u32 dim, u8 kind, row-major payload.
std::string SerializeDescriptors(const DescriptorSet& descriptors);
DescriptorSet ParseDescriptors(std::string_view bytes, const std::string& path);

// "DPTH", u32 w, u32 h, float32 row-major.
std::string SerializeDepth(const DepthMap& depth);
DepthMap ParseDepth(std::string_view bytes, const std::string& path);

struct ObservationEntry {
  std::string image_id;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const ObservationEntry&) const = default;
};

// 3D point id -> observing images.
using ObservationTable = std::map<int64_t, std::vector<ObservationEntry>>;

// "point_id image_id x y", grouped by point id.
std::string SerializeObservations(const ObservationTable& table);
ObservationTable ParseObservations(std::string_view text, const std::string& path);

// Header "#matches <direction> <provenance>", then "idx_i idx_j distance".
// Second-neighbour distances are not stored.
std::string SerializeMatches(const MatchList& matches);
MatchList ParseMatches(std::string_view text, const std::string& path);

// "image_id R(9, row-major) t(3)" per registered image.
std::string SerializeReconstruction(const Reconstruction& reconstruction);
Reconstruction ParseReconstruction(std::string_view text, const std::string& path);

struct PairEntry {
  std::string image_i;
  std::string image_j;
  double covisibility = 0.0;

  bool operator==(const PairEntry&) const = default;
};

// "image_i image_j covisibility".
std::string SerializePairs(const std::vector<PairEntry>& pairs);
std::vector<PairEntry> ParsePairs(std::string_view text, const std::string& path);

// Identifiers are non-empty and free of whitespace.
bool IsValidId(std::string_view id);

}  // namespace imb::io
