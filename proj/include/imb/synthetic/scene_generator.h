#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imb/geometry/types.h"
#include "imb/io/scene.h"
#include "imb/util/random.h"

namespace imb {

// Cameras on a ring around the origin, looking at a point cloud that sits
// on a ground disk (z = 0).
struct SynthSpec {
  std::string scene_name = "synthetic";
  std::string method_name = "synth";
  int num_cameras = 20;
  int num_points = 2000;
  double planar_fraction = 0.0;  // share of points on the ground disk
  double keypoint_noise_px = 0.0;
  int descriptor_dim = 64;
  double descriptor_noise = 0.1;  // expected norm of the per-view perturbation
  double outlier_fraction = 0.0;  // keypoints with unrelated descriptors
  int image_width = 1024;
  int image_height = 768;
  double focal_px = 0.0;          // 0 picks a focal length framing the cloud
  double ring_radius = 10.0;
  double ring_height = 4.0;
  double ring_arc_deg = 360.0;
  double camera_jitter = 0.3;     // std-dev of center and look-at offsets
  double cloud_radius = 2.5;
  double plane_radius = 4.0;
  bool render_depth = true;
  int depth_splat_radius = 1;     // point footprint is (2r+1)^2 pixels
  uint64_t seed = 0;

  // Throws kInvalidArgument.
  void Validate() const;
};

struct SyntheticScene {
  SceneBundle bundle;
  std::vector<Vec3> points;  // indexed by point id
  // Per image (bundle order), per keypoint: the generating point id and
  // whether its descriptor was replaced by an unrelated one.
  std::vector<std::vector<int64_t>> keypoint_point;
  std::vector<std::vector<uint8_t>> keypoint_outlier;
};

SyntheticScene GenerateScene(const SynthSpec& spec);

struct PairGeometry {
  std::optional<FundamentalMatrix> fundamental;  // absent for pure rotation
  RelativeMotion motion;
  std::optional<RelativePose> pose;              // unit-baseline form
  double covisibility = 0.0;
  bool pure_rotation = false;
};

// Exact two-view geometry of images i and j of the scene (bundle indices).
PairGeometry TruePairGeometry(const SceneBundle& scene, int i, int j);

// A single two-view problem with labelled correspondences.
struct PairSynthSpec {
  int num_inliers = 200;
  double outlier_fraction = 0.0;  // of all returned correspondences
  double noise_px = 0.0;
  double planar_fraction = 0.0;   // of the inliers, on one scene plane
  int image_width = 1024;
  int image_height = 768;
  double min_rotation_deg = 10.0;  // orbit angle about the scene center
  double max_rotation_deg = 40.0;
  double scene_extent = 0.5;       // scene half-size over camera distance
  double min_focal = 0.7;         // focal length range, in image widths
  double max_focal = 1.1;
};

struct SyntheticPair {
  CameraModel cam_i;
  CameraModel cam_j;
  std::vector<PointPair> correspondences;
  std::vector<uint8_t> is_inlier;
  RelativeMotion motion;
};

SyntheticPair SynthesizePair(const PairSynthSpec& spec, Random& rng);

// Random rotation by `angle_rad` about a uniformly drawn axis.
Mat3 RandomRotation(Random& rng, double angle_rad);
Mat3 AxisAngle(const Vec3& axis, double angle_rad);
// World-to-camera rotation looking from `center` toward `target`.
Mat3 LookAt(const Vec3& center, const Vec3& target, const Vec3& up);

}  // namespace imb
