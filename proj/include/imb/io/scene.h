#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imb/geometry/types.h"
#include "imb/io/formats.h"
#include "imb/matching/features.h"

namespace imb {

struct SceneImage {
  std::string id;
  CameraModel camera;
  std::optional<DepthMap> depth;

  bool operator==(const SceneImage&) const = default;
};

struct FeatureSet {
  KeypointList keypoints;
  DescriptorSet descriptors;

  bool operator==(const FeatureSet&) const = default;
};

// Per feature method, per image id.
using FeatureTable = std::map<std::string, std::map<std::string, FeatureSet>>;

struct SceneBundle {
  std::string name;
  std::vector<SceneImage> images;  // sorted by id
  FeatureTable features;
  io::ObservationTable observations;
  std::vector<io::PairEntry> pairs;  // every unordered pair, sorted

  // Index into `images`, or -1.
  int ImageIndex(const std::string& id) const;
  const FeatureSet& Features(const std::string& method, const std::string& image_id) const;

  // Throws kValidation listing every violated invariant.
  void Validate() const;

  bool operator==(const SceneBundle&) const = default;
};

// Co-visibility of every unordered image pair from the observation table,
// sorted by (image_i, image_j).
std::vector<io::PairEntry> ComputePairCovisibility(
    const std::vector<SceneImage>& images, const io::ObservationTable& observations);

// Camera poses of every image, as a reconstruction.
Reconstruction GroundTruthPoses(const SceneBundle& scene);

// <root>/<scene>/{calib/<id>.txt, keypoints/<method>/<id>.txt,
// descriptors/<method>/<id>.desc, depth/<id>.dpth, observations.txt,
// pairs.txt}. pairs.txt is optional on load and recomputed when absent.
SceneBundle LoadScene(const std::string& root, const std::string& scene);
void SaveScene(const SceneBundle& scene, const std::string& root);

// Lists files a load would need but cannot find, without parsing anything.
std::vector<std::string> MissingSceneFiles(const std::string& root, const std::string& scene);

}  // namespace imb
