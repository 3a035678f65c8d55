#include "imb/estimators/fundamental_ransac.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "imb/estimators/homography.h"
#include "imb/geometry/fundamental.h"
#include "imb/util/error.h"
#include "imb/util/random.h"

namespace imb {
namespace {

struct Score {
  int count = -1;
  double sum = std::numeric_limits<double>::infinity();
};

bool Better(const Score& a, const Score& b) {
  return a.count > b.count || (a.count == b.count && a.sum < b.sum);
}

struct Candidate {
  FundamentalMatrix F;
  Score score;
};

struct EpipolarTerms {
  double e2, gi, gj;
};

// e^2 and the squared line-gradient norms in image j (gj) and image i (gi).
inline EpipolarTerms Terms(const double* f, double xi, double yi, double xj, double yj) {
  const double a = f[0] * xi + f[1] * yi + f[2];
  const double b = f[3] * xi + f[4] * yi + f[5];
  const double c = f[6] * xi + f[7] * yi + f[8];
  const double e = xj * a + yj * b + c;
  const double ap = f[0] * xj + f[3] * yj + f[6];
  const double bp = f[1] * xj + f[4] * yj + f[7];
  return {e * e, ap * ap + bp * bp, a * a + b * b};
}

// Threshold excess per point (<= 0 for inliers) and the block's inlier count.
// The symmetric test e^2 (1/gj + 1/gi) / 2 <= eta^2 and the Sampson test
// e^2 / (gi + gj) <= eta^2 are cross-multiplied so outliers cost no division.
// Cloned for AVX2; without FMA contraction every clone rounds like the scalar
// path in ScanBlock.
__attribute__((target_clones("avx2", "default")))
int SymmetricExcess(const double* f, const double* xi, const double* yi, const double* xj,
                    const double* yj, int len, double threshold_sq,
                    double* __restrict excess) {
  int count = 0;
  for (int k = 0; k < len; ++k) {
    const EpipolarTerms t = Terms(f, xi[k], yi[k], xj[k], yj[k]);
    excess[k] = t.e2 * (t.gi + t.gj) - 2.0 * threshold_sq * t.gi * t.gj;
    count += excess[k] <= 0.0;
  }
  return count;
}

__attribute__((target_clones("avx2", "default")))
int SampsonExcess(const double* f, const double* xi, const double* yi, const double* xj,
                  const double* yj, int len, double threshold_sq, double* __restrict excess) {
  int count = 0;
  for (int k = 0; k < len; ++k) {
    const EpipolarTerms t = Terms(f, xi[k], yi[k], xj[k], yj[k]);
    excess[k] = t.e2 - threshold_sq * (t.gi + t.gj);
    count += excess[k] <= 0.0;
  }
  return count;
}

// Structure-of-arrays residual kernel used for every hypothesis.
class Scorer {
 public:
  Scorer(std::span<const PointPair> matches, double threshold,
         ResidualKind kind)
      : n_(static_cast<int>(matches.size())),
        threshold_(threshold),
        threshold_sq_(threshold * threshold),
        kind_(kind),
        xi_(n_), yi_(n_), xj_(n_), yj_(n_), r2_(kBlock), idx_(kBlock) {
    for (int k = 0; k < n_; ++k) {
      xi_[k] = matches[k].xi.x();
      yi_[k] = matches[k].xi.y();
      xj_[k] = matches[k].xj.x();
      yj_[k] = matches[k].xj.y();
    }
  }

  int size() const { return n_; }

  // Full score, or count -1 once the model provably cannot reach
  // `min_count` inliers.
  Score Evaluate(const Mat3& F, int min_count = 0) const {
    Score s;
    s.count = 0;
    s.sum = 0.0;
    for (int start = 0; start < n_; start += kBlock) {
      const int len = std::min(kBlock, n_ - start);
      const int found = ScanBlock(F, start, len);
      for (int k = 0; k < found; ++k) s.sum += std::sqrt(r2_[k]);
      s.count += found;
      s.sum += threshold_ * (len - found);
      if (s.count + (n_ - start - len) < min_count) return Score{};
    }
    return s;
  }

  std::vector<int> Inliers(const Mat3& F) const {
    std::vector<int> out;
    for (int start = 0; start < n_; start += kBlock) {
      const int found = ScanBlock(F, start, std::min(kBlock, n_ - start));
      for (int k = 0; k < found; ++k) out.push_back(start + idx_[k]);
    }
    return out;
  }

 private:
  static constexpr int kBlock = 32;

  // Writes the block's inlier positions to idx_ and their squared
  // residuals to r2_; returns the inlier count.
  int ScanBlock(const Mat3& F, int start, int len) const {
    const double* xi = xi_.data() + start;
    const double* yi = yi_.data() + start;
    const double* xj = xj_.data() + start;
    const double* yj = yj_.data() + start;
    const bool symmetric = kind_ == ResidualKind::kSymmetricEpipolar;
    double excess[kBlock];
    const double f[9] = {F(0, 0), F(0, 1), F(0, 2), F(1, 0), F(1, 1),
                         F(1, 2), F(2, 0), F(2, 1), F(2, 2)};
    const int count = symmetric ? SymmetricExcess(f, xi, yi, xj, yj, len, threshold_sq_, excess)
                                : SampsonExcess(f, xi, yi, xj, yj, len, threshold_sq_, excess);
    if (count == 0) return 0;
    int found = 0;
    for (int k = 0; k < len; ++k) {
      if (!(excess[k] <= 0.0)) continue;
      const EpipolarTerms t = Terms(f, xi[k], yi[k], xj[k], yj[k]);
      double r2 = 0.0;
      if (t.e2 > 0.0) {
        r2 = symmetric ? 0.5 * t.e2 * (1.0 / t.gj + 1.0 / t.gi) : t.e2 / (t.gi + t.gj);
      }
      idx_[found] = k;
      r2_[found] = r2;
      ++found;
    }
    return found;
  }

  int n_;
  double threshold_;
  double threshold_sq_;
  ResidualKind kind_;
  std::vector<double> xi_, yi_, xj_, yj_;
  mutable std::vector<double> r2_;
  mutable std::vector<int> idx_;
};

std::vector<PointPair> Gather(std::span<const PointPair> matches,
                              const std::vector<int>& indices) {
  std::vector<PointPair> out;
  out.reserve(indices.size());
  for (const int k : indices) out.push_back(matches[k]);
  return out;
}

Candidate LocalOptimize(const Candidate& start,
                        std::span<const PointPair> matches,
                        const Scorer& scorer, int max_rounds) {
  Candidate current = start;
  std::vector<int> previous;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> inliers = scorer.Inliers(current.F.matrix());
    if (round > 0 && inliers == previous) break;
    if (inliers.size() < 8) break;
    previous = inliers;
    std::optional<FundamentalMatrix> refit;
    try {
      refit = EightPointSampsonWeighted(Gather(matches, inliers),
                                        current.F.matrix());
    } catch (const Error&) {
      break;
    }
    const Score s = scorer.Evaluate(refit->matrix());
    if (!Better(s, current.score)) break;
    current = Candidate{*refit, s};
  }
  return current;
}

std::optional<Candidate> PlaneAndParallax(const Mat3& plane_homography,
                                          std::span<const PointPair> matches,
                                          const Scorer& scorer,
                                          const RansacConfig& config,
                                          Random* rng) {
  const double eta = config.threshold;
  auto plane_members = [&](const Mat3& H) {
    std::vector<int> members;
    for (int k = 0; k < static_cast<int>(matches.size()); ++k) {
      if (TransferError(H, matches[k]) <= eta) members.push_back(k);
    }
    return members;
  };

  Mat3 H = plane_homography;
  std::vector<int> plane = plane_members(H);
  for (int round = 0; round < 2 && plane.size() >= 4; ++round) {
    const auto refit = HomographyDlt(Gather(matches, plane));
    if (!refit) break;
    std::vector<int> refit_plane = plane_members(*refit);
    if (refit_plane.size() <= plane.size()) break;
    H = *refit;
    plane = std::move(refit_plane);
  }

  std::vector<int> off_plane;
  {
    size_t p = 0;
    for (int k = 0; k < static_cast<int>(matches.size()); ++k) {
      if (p < plane.size() && plane[p] == k) {
        ++p;
      } else {
        off_plane.push_back(k);
      }
    }
  }
  const int num_off = static_cast<int>(off_plane.size());
  if (num_off < 2) return std::nullopt;

  std::optional<Candidate> best;
  int64_t limit = config.plane_parallax_max_iterations;
  int pick[2];
  for (int64_t it = 0; it < limit; ++it) {
    rng->SampleWithoutReplacement(num_off, 2, pick);
    const PointPair& a = matches[off_plane[pick[0]]];
    const PointPair& b = matches[off_plane[pick[1]]];
    // Each off-plane correspondence gives an epipolar line through the
    // plane-transferred point; their intersection is the epipole.
    const Vec3 la = a.xj.homogeneous().cross(H * a.xi.homogeneous());
    const Vec3 lb = b.xj.homogeneous().cross(H * b.xi.homogeneous());
    const Vec3 epipole = la.cross(lb);
    const Mat3 F = Skew(epipole) * H;
    const double norm = F.norm();
    if (!(norm > 0.0) || !F.allFinite()) continue;
    const Score s = scorer.Evaluate(F / norm,
                                    best ? best->score.count : 0);
    if (best && !Better(s, best->score)) continue;
    if (s.count < 0) continue;
    const FundamentalMatrix Fr = FundamentalMatrix::ProjectToRank2(F);
    best = Candidate{Fr, scorer.Evaluate(Fr.matrix())};
    const double support =
        std::max(0, best->score.count - static_cast<int>(plane.size())) /
        static_cast<double>(num_off);
    limit = std::min(config.plane_parallax_max_iterations,
                     AdaptiveIterationBound(std::min(1.0, support),
                                            config.confidence, 2));
  }
  return best;
}

}  // namespace

std::string RansacVariantName(RansacVariant variant) {
  return variant == RansacVariant::kPlain ? "plain" : "degensac";
}

RansacVariant ParseRansacVariant(const std::string& name) {
  if (name == "plain" || name == "pyransac") return RansacVariant::kPlain;
  if (name == "degensac") return RansacVariant::kDegensac;
  Throw(ErrorCode::kInvalidArgument, "unknown RANSAC variant: " + name);
}

void RansacConfig::Validate() const {
  IMB_CHECK_ARG(confidence > 0.0 && confidence < 1.0,
                "confidence must be in (0, 1)");
  IMB_CHECK_ARG(threshold > 0.0 && std::isfinite(threshold),
                "inlier threshold must be positive");
  IMB_CHECK_ARG(max_iterations >= 1, "max iterations must be >= 1");
  IMB_CHECK_ARG(lo_max_rounds >= 0, "LO rounds must be >= 0");
  IMB_CHECK_ARG(degeneracy_min_plane_inliers >= 3 &&
                    degeneracy_min_plane_inliers <= 7,
                "degeneracy plane inliers must be in [3, 7]");
  IMB_CHECK_ARG(plane_parallax_max_iterations >= 1,
                "plane-and-parallax iterations must be >= 1");
}

int64_t AdaptiveIterationBound(double inlier_ratio, double confidence,
                               int sample_size) {
  IMB_CHECK_ARG(inlier_ratio >= 0.0 && inlier_ratio <= 1.0,
                "inlier ratio must be in [0, 1]");
  IMB_CHECK_ARG(confidence > 0.0 && confidence < 1.0,
                "confidence must be in (0, 1)");
  if (inlier_ratio == 0.0) return kUnboundedIterations;
  const double p = std::pow(inlier_ratio, sample_size);
  if (p >= 1.0) return 1;
  const double denom = std::log1p(-p);
  if (denom == 0.0) return kUnboundedIterations;
  const double k = std::ceil(std::log(1.0 - confidence) / denom);
  if (!(k < 9.0e18)) return kUnboundedIterations;
  return std::max<int64_t>(1, static_cast<int64_t>(k));
}

DegeneracyResult HomographyDegeneracyCheck(
    const std::array<PointPair, 7>& sample, const Mat3& F, double threshold,
    int min_plane_inliers) {
  static constexpr int kTriplets[5][3] = {
      {0, 1, 2}, {3, 4, 5}, {0, 1, 6}, {3, 4, 6}, {2, 5, 6}};
  DegeneracyResult result;
  int best_count = -1;
  for (const auto& triplet : kTriplets) {
    const auto H = PlaneInducedHomography(
        F, {sample[triplet[0]], sample[triplet[1]], sample[triplet[2]]});
    if (!H) continue;
    std::vector<int> members;
    for (int k = 0; k < 7; ++k) {
      if (TransferError(*H, sample[k]) <= threshold) members.push_back(k);
    }
    const int count = static_cast<int>(members.size());
    if (count >= min_plane_inliers && count > best_count) {
      best_count = count;
      result.degenerate = true;
      result.homography = *H;
      result.plane_inliers = std::move(members);
    }
  }
  return result;
}

EpipolarModel EstimateFundamental(std::span<const PointPair> matches,
                                  const RansacConfig& config) {
  config.Validate();
  const int n = static_cast<int>(matches.size());
  if (n < 7) {
    Throw(ErrorCode::kInsufficientCorrespondences,
          "insufficient correspondences: " + std::to_string(n) + " < 7");
  }
  const Scorer scorer(matches, config.threshold, config.residual);
  Random rng(config.seed);
  EpipolarModel model;

  std::optional<Candidate> best;
  int64_t limit = config.max_iterations;
  int64_t iteration = 0;
  std::array<int, 7> indices;
  std::array<PointPair, 7> sample;
  std::array<Mat3, 3> roots;
  for (; iteration < limit; ++iteration) {
    rng.SampleWithoutReplacement(n, 7, indices.data());
    for (int k = 0; k < 7; ++k) sample[k] = matches[indices[k]];
    const int num_roots = internal::SevenPointRaw(sample, &roots);
    if (num_roots < 0) {
      ++model.degenerate_samples;
      continue;
    }
    for (int r = 0; r < num_roots; ++r) {
      const int bar = best ? best->score.count : 0;
      const Score raw = scorer.Evaluate(roots[r], bar);
      if (raw.count < 0 || (best && !Better(raw, best->score))) continue;
      const FundamentalMatrix F = FundamentalMatrix::ProjectToRank2(roots[r]);
      Candidate candidate{F, scorer.Evaluate(F.matrix())};
      if (best && !Better(candidate.score, best->score)) continue;
      model.best_minimal_inliers =
          std::max(model.best_minimal_inliers, candidate.score.count);

      if (config.variant == RansacVariant::kDegensac) {
        const DegeneracyResult degeneracy = HomographyDegeneracyCheck(
            sample, F.matrix(), config.threshold,
            config.degeneracy_min_plane_inliers);
        if (degeneracy.degenerate) {
          ++model.planar_degeneracies;
          const auto recovered = PlaneAndParallax(
              degeneracy.homography, matches, scorer, config, &rng);
          if (recovered && Better(recovered->score, candidate.score)) {
            candidate = *recovered;
            ++model.degeneracy_recoveries;
          }
        }
      }
      if (config.local_optimization) {
        candidate = LocalOptimize(candidate, matches, scorer,
                                  config.lo_max_rounds);
      }
      best = candidate;
      limit = std::min(
          config.max_iterations,
          AdaptiveIterationBound(static_cast<double>(best->score.count) / n,
                                 config.confidence));
    }
  }
  model.iterations = iteration;

  if (!best || best->score.count < 8) {
    Throw(ErrorCode::kEstimationFailed,
          "estimation failed: best model has " +
              std::to_string(best ? best->score.count : 0) + " inliers");
  }

  // Least-squares refits on the consensus set, repeated until the set stops
  // changing. A refit replaces the best model even when its count is lower,
  // since the count-maximizing model is biased toward borderline points, but
  // never drops below the best minimal-sample count.
  {
    std::vector<int> inliers = scorer.Inliers(best->F.matrix());
    for (int round = 0; round < 10; ++round) {
      std::optional<Candidate> refit;
      try {
        const FundamentalMatrix F = EightPoint(Gather(matches, inliers));
        refit = Candidate{F, scorer.Evaluate(F.matrix())};
      } catch (const Error&) {
        break;
      }
      if (refit->score.count < std::max(8, model.best_minimal_inliers)) break;
      best = *refit;
      std::vector<int> next = scorer.Inliers(best->F.matrix());
      if (next == inliers) break;
      inliers = std::move(next);
    }
  }

  model.F = best->F;
  model.inlier_mask.assign(n, 0);
  model.num_inliers = 0;
  model.truncated_residual_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = EpipolarResidual(config.residual, model.F.matrix(),
                                      matches[k].xi, matches[k].xj);
    if (r <= config.threshold) {
      model.inlier_mask[k] = 1;
      ++model.num_inliers;
      model.truncated_residual_sum += r;
    } else {
      model.truncated_residual_sum += config.threshold;
    }
  }
  return model;
}

}  // namespace imb
