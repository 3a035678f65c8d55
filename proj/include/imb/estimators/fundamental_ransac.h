#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "imb/geometry/residuals.h"
#include "imb/geometry/types.h"

namespace imb {

enum class RansacVariant {
  kPlain,     // LO-RANSAC without the degeneracy check
  kDegensac,  // plus homography-degeneracy detection and recovery
};

std::string RansacVariantName(RansacVariant variant);
RansacVariant ParseRansacVariant(const std::string& name);

struct RansacConfig {
  double confidence = 0.999999;      // tau
  double threshold = 1.0;            // eta, pixels
  int64_t max_iterations = 250000;   // Gamma
  uint64_t seed = 0;
  RansacVariant variant = RansacVariant::kDegensac;
  ResidualKind residual = ResidualKind::kSymmetricEpipolar;
  bool local_optimization = true;
  int lo_max_rounds = 4;
  // Sample correspondences a homography must explain for the sample to be
  // declared planar-degenerate.
  int degeneracy_min_plane_inliers = 5;
  int64_t plane_parallax_max_iterations = 1000;

  void Validate() const;
  bool operator==(const RansacConfig&) const = default;
};

struct EpipolarModel {
  FundamentalMatrix F = FundamentalMatrix::ProjectToRank2(Mat3::Identity());
  std::vector<uint8_t> inlier_mask;
  int num_inliers = 0;
  // Sum over all matches of min(residual, eta); lower breaks count ties.
  double truncated_residual_sum = 0.0;
  int64_t iterations = 0;
  int64_t degenerate_samples = 0;     // seven-point rejections
  int64_t planar_degeneracies = 0;    // degensac detections
  int64_t degeneracy_recoveries = 0;  // plane-and-parallax accepted
  int best_minimal_inliers = 0;       // before local optimization
};

inline constexpr int64_t kUnboundedIterations =
    std::numeric_limits<int64_t>::max();

// ceil(log(1 - confidence) / log(1 - w^m)); 1 when w = 1, and
// kUnboundedIterations when w = 0 (callers cap at Gamma).
int64_t AdaptiveIterationBound(double inlier_ratio, double confidence,
                               int sample_size = 7);

struct DegeneracyResult {
  bool degenerate = false;
  Mat3 homography = Mat3::Identity();
  std::vector<int> plane_inliers;  // positions within the sample
};

// Tests whether a homography compatible with F, built from three sample
// correspondences, explains at least `min_plane_inliers` of the seven
// within `threshold` pixels of transfer error. Triplets follow the DEGENSAC
// reference: {0,1,2}, {3,4,5}, {0,1,6}, {3,4,6}, {2,5,6}.
DegeneracyResult HomographyDegeneracyCheck(
    const std::array<PointPair, 7>& sample, const Mat3& F, double threshold,
    int min_plane_inliers = 5);

// Robust fundamental matrix estimation. Throws kInsufficientCorrespondences
// for fewer than 7 matches and kEstimationFailed when no model reaches 8
// inliers.
EpipolarModel EstimateFundamental(std::span<const PointPair> matches,
                                  const RansacConfig& config);

}  // namespace imb
