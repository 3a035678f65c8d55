#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "imb/metrics/accuracy.h"
#include "imb/metrics/alignment.h"
#include "imb/metrics/covisibility.h"
#include "imb/metrics/multiview.h"
#include "imb/metrics/pose_error.h"
#include "imb/metrics/repeatability.h"
#include "test_util.h"

namespace imb {
namespace {

using testing::DegToRad;
using testing::MakeCamera;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Applies x -> s Q x + c to the world frame of every camera.
Reconstruction TransformWorld(const Reconstruction& rec, double s, const Mat3& Q, const Vec3& c) {
  Reconstruction out;
  for (const auto& [id, pose] : rec) {
    CameraPose p;
    p.rotation = pose.rotation * Q.transpose();
    p.translation = -p.rotation * (s * Q * pose.Center() + c);
    out[id] = p;
  }
  return out;
}

Reconstruction RandomReconstruction(Random& rng, int n) {
  Reconstruction rec;
  for (int k = 0; k < n; ++k) {
    CameraPose p;
    p.rotation = RandomRotation(rng, rng.Uniform(0.0, 3.0));
    p.translation = Vec3(rng.Normal(), rng.Normal(), rng.Normal()) * 3.0;
    rec["img" + std::to_string(k)] = p;
  }
  return rec;
}

std::vector<std::string> Ids(const Reconstruction& rec) {
  std::vector<std::string> ids;
  for (const auto& [id, pose] : rec) ids.push_back(id);
  return ids;
}

TEST(RotationErrorTest, Examples) {
  Random rng(1);
  const Mat3 R = RandomRotation(rng, 1.0);
  EXPECT_NEAR(RotationErrorDeg(R, R), 0.0, 1e-6);
  for (int k = 0; k < 20; ++k) {
    const Mat3 d = RandomRotation(rng, DegToRad(10.0));
    EXPECT_NEAR(RotationErrorDeg(R * d, R), 10.0, 1e-9);
  }
  const Mat3 flip = AxisAngle(Vec3(1, 2, 3).normalized(), testing::kPi);
  EXPECT_NEAR(RotationErrorDeg(R * flip, R), 180.0, 1e-6);
}

TEST(RotationErrorTest, MetricProperties) {
  Random rng(2);
  for (int k = 0; k < 200; ++k) {
    const Mat3 a = RandomRotation(rng, rng.Uniform(0, 3));
    const Mat3 b = RandomRotation(rng, rng.Uniform(0, 3));
    const Mat3 c = RandomRotation(rng, rng.Uniform(0, 3));
    EXPECT_NEAR(RotationErrorDeg(a, b), RotationErrorDeg(b, a), 1e-9);
    EXPECT_LE(RotationErrorDeg(a, c), RotationErrorDeg(a, b) + RotationErrorDeg(b, c) + 1e-9);
    EXPECT_GT(RotationErrorDeg(a, b), 0.0);
  }
}

TEST(TranslationErrorTest, Examples) {
  const Vec3 t(1, 2, 3);
  EXPECT_NEAR(TranslationErrorDeg(2.0 * t, t), 0.0, 1e-6);
  EXPECT_NEAR(TranslationErrorDeg(Vec3::UnitX(), Vec3::UnitY()), 90.0, 1e-12);
  EXPECT_NEAR(TranslationErrorDeg(-t, t), 180.0, 1e-6);
  EXPECT_IMB_ERROR(TranslationErrorDeg(t, Vec3(1e-10, 0, 0)), ErrorCode::kPureRotation);
}

TEST(PairPoseErrorTest, CombinationModes) {
  const Mat3 R = AxisAngle(Vec3::UnitZ(), DegToRad(3.0));
  const Vec3 t_est = AxisAngle(Vec3::UnitY(), DegToRad(7.0)) * Vec3::UnitX();
  const PairPoseError e = ComputePairPoseError(R, t_est, Mat3::Identity(), Vec3::UnitX());
  EXPECT_NEAR(e.rotation_deg, 3.0, 1e-9);
  EXPECT_NEAR(e.translation_deg, 7.0, 1e-9);
  EXPECT_EQ(e.combined_deg, e.translation_deg);
  EXPECT_EQ(ComputePairPoseError(R, t_est, Mat3::Identity(), Vec3::UnitX(),
                                 ErrorCombination::kRotationOnly)
                .combined_deg,
            e.rotation_deg);
  EXPECT_TRUE(PairPoseError::Failed().failed());
  EXPECT_TRUE(std::isinf(PairPoseError::Failed().combined_deg));
  EXPECT_EQ(ParseErrorCombination(ErrorCombinationName(ErrorCombination::kTranslationOnly)),
            ErrorCombination::kTranslationOnly);
  EXPECT_IMB_ERROR(ParseErrorCombination("mean"), ErrorCode::kInvalidArgument);
}

TEST(AccuracyCurveTest, Examples) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(ComputeAccuracyCurve(zeros).mAA, 1.0);
  const std::vector<double> mixed{0.5, 3.5, 20.0};
  const AccuracyCurve c = ComputeAccuracyCurve(mixed);
  EXPECT_NEAR(c.mAA, 17.0 / 30.0, 1e-12);
  EXPECT_NEAR(c.accuracy[2], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.accuracy[3], 2.0 / 3.0, 1e-15);
  const std::vector<double> failed(4, kInf);
  EXPECT_EQ(ComputeAccuracyCurve(failed).mAA, 0.0);
  EXPECT_IMB_ERROR(ComputeAccuracyCurve(std::vector<double>{}), ErrorCode::kNoPairs);
}

TEST(AccuracyCurveTest, ErrorOnThresholdIsNotCounted) {
  const std::vector<double> five{5.0};
  const AccuracyCurve c = ComputeAccuracyCurve(five);
  EXPECT_EQ(c.accuracy[4], 0.0);
  EXPECT_EQ(c.accuracy[5], 1.0);
  EXPECT_DOUBLE_EQ(c.mAA, 0.5);
}

TEST(AccuracyCurveTest, MonotoneAndMeanOfSamples) {
  Random rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> errors;
    for (int k = 0; k < 30; ++k) {
      errors.push_back(rng.Uniform01() < 0.1 ? kInf : rng.Uniform(0, 15));
    }
    const AccuracyCurve c = ComputeAccuracyCurve(errors);
    double sum = 0.0;
    for (int k = 0; k < kNumAccuracyThresholds; ++k) {
      if (k > 0) {
        EXPECT_GE(c.accuracy[k], c.accuracy[k - 1]);
      }
      sum += c.accuracy[k];
    }
    EXPECT_NEAR(c.mAA, sum / kNumAccuracyThresholds, 1e-15);
    EXPECT_GE(c.mAA, 0.0);
    EXPECT_LE(c.mAA, 1.0);
  }
}

TEST(AccuracyCurveTest, MeanCurve) {
  const AccuracyCurve a = ComputeAccuracyCurve(std::vector<double>{0.0});
  const AccuracyCurve b = ComputeAccuracyCurve(std::vector<double>{kInf});
  const std::vector<AccuracyCurve> both{a, b};
  const AccuracyCurve m = MeanCurve(both);
  EXPECT_DOUBLE_EQ(m.mAA, 0.5);
  EXPECT_DOUBLE_EQ(m.accuracy[0], 0.5);
}

TEST(AlignSimilarityTest, RecoversConstructedTransform) {
  Random rng(4);
  const Mat3 R0 = RandomRotation(rng, 1.2);
  const Vec3 c(1, -2, 3);
  std::vector<Vec3> src, dst;
  for (int k = 0; k < 10; ++k) {
    src.emplace_back(rng.Normal(), rng.Normal(), rng.Normal());
    dst.push_back(2.0 * R0 * src.back() + c);
  }
  const TrajectoryAlignment a = AlignSimilarity(src, dst);
  EXPECT_NEAR(a.scale, 2.0, 1e-9);
  EXPECT_LT((a.rotation - R0).norm(), 1e-9);
  EXPECT_LT((a.translation - c).norm(), 1e-9);
  EXPECT_LT(a.rmse, 1e-9);

  const TrajectoryAlignment id = AlignSimilarity(src, src);
  EXPECT_NEAR(id.scale, 1.0, 1e-12);
  EXPECT_LT((id.rotation - Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT(id.rmse, 1e-12);
}

TEST(AlignSimilarityTest, Underdetermined) {
  const std::vector<Vec3> two{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  EXPECT_IMB_ERROR(AlignSimilarity(two, two), ErrorCode::kAlignmentUnderdetermined);
  const std::vector<Vec3> line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  EXPECT_IMB_ERROR(AlignSimilarity(line, line), ErrorCode::kAlignmentUnderdetermined);
}

TEST(AteTest, Examples) {
  Random rng(5);
  std::vector<Vec3> gt;
  for (int k = 0; k < 6; ++k) gt.emplace_back(rng.Normal(), rng.Normal(), rng.Normal());
  const Mat3 Q = RandomRotation(rng, 0.8);
  std::vector<Vec3> est;
  for (const Vec3& p : gt) est.push_back(0.3 * Q * p + Vec3(4, 5, 6));
  EXPECT_LT(*AbsoluteTrajectoryError(est, gt), 1e-9);
  EXPECT_FALSE(AbsoluteTrajectoryError(std::span(est).first(2), std::span(gt).first(2)));
}

TEST(AteTest, SinglePerturbedCameraIsBounded) {
  Random rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> gt;
    for (int k = 0; k < 4; ++k) gt.emplace_back(rng.Normal(), rng.Normal(), rng.Normal());
    std::vector<Vec3> est = gt;
    const double delta = rng.Uniform(0.01, 0.5);
    est[rng.UniformInt(4)] += delta * Vec3(rng.Normal(), rng.Normal(), rng.Normal()).normalized();
    const double ate = *AbsoluteTrajectoryError(est, gt);
    EXPECT_GT(ate, 0.0);
    EXPECT_LE(ate, delta);
  }
}

TEST(AteTest, InvariantToSimilarityOfEstimates) {
  Random rng(7);
  std::vector<Vec3> gt, est;
  for (int k = 0; k < 8; ++k) {
    gt.emplace_back(rng.Normal(), rng.Normal(), rng.Normal());
    est.push_back(gt.back() + 0.1 * Vec3(rng.Normal(), rng.Normal(), rng.Normal()));
  }
  const double base = *AbsoluteTrajectoryError(est, gt);
  const Mat3 Q = RandomRotation(rng, 2.0);
  std::vector<Vec3> moved;
  for (const Vec3& p : est) moved.push_back(5.0 * Q * p - Vec3(1, 1, 1));
  EXPECT_NEAR(*AbsoluteTrajectoryError(moved, gt), base, 1e-9);
}

TEST(CoVisibilityTest, Examples) {
  const std::vector<Vec2> full{Vec2(0, 0), Vec2(100, 50)};
  EXPECT_DOUBLE_EQ(CoVisibility(full, 100, 50, full, 100, 50), 1.0);
  const std::vector<Vec2> half{Vec2(0, 0), Vec2(50, 50)};
  EXPECT_DOUBLE_EQ(CoVisibility(half, 100, 50, full, 100, 50), 0.5);
  EXPECT_DOUBLE_EQ(CoVisibility({}, 100, 50, {}, 100, 50), 0.0);
}

TEST(CoVisibilityTest, Symmetric) {
  Random rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> a, b;
    for (int k = 0; k < 10; ++k) {
      a.emplace_back(rng.Uniform(0, 640), rng.Uniform(0, 480));
      b.emplace_back(rng.Uniform(0, 800), rng.Uniform(0, 600));
    }
    EXPECT_EQ(CoVisibility(a, 640, 480, b, 800, 600), CoVisibility(b, 800, 600, a, 640, 480));
  }
}

TEST(MultiviewTest, SimilarityOfGroundTruthScoresOne) {
  Random rng(9);
  const Reconstruction gt = RandomReconstruction(rng, 6);
  const Reconstruction est = TransformWorld(gt, 3.0, RandomRotation(rng, 1.0), Vec3(1, 2, 3));
  const BagScore s = ScoreBag(est, gt, Ids(gt));
  EXPECT_DOUBLE_EQ(s.curve.mAA, 1.0);
  EXPECT_EQ(s.num_pairs, 15);
  EXPECT_EQ(s.num_registered, 6);
  EXPECT_LT(*s.ate, 1e-9);
}

TEST(MultiviewTest, HalfRegisteredBagOfFour) {
  Random rng(10);
  const Reconstruction gt = RandomReconstruction(rng, 4);
  Reconstruction est = gt;
  est.erase("img0");
  est.erase("img1");
  const BagScore s = ScoreBag(est, gt, Ids(gt));
  EXPECT_NEAR(s.curve.mAA, 1.0 / 6.0, 1e-15);
  EXPECT_FALSE(s.ate.has_value());
}

TEST(MultiviewTest, EmptyReconstructionScoresZero) {
  Random rng(11);
  const Reconstruction gt = RandomReconstruction(rng, 5);
  EXPECT_EQ(ScoreBag({}, gt, Ids(gt)).curve.mAA, 0.0);
}

TEST(MultiviewTest, BadBags) {
  Random rng(12);
  const Reconstruction gt = RandomReconstruction(rng, 3);
  EXPECT_IMB_ERROR(ScoreBag(gt, gt, {"img0"}), ErrorCode::kInvalidArgument);
  EXPECT_IMB_ERROR(ScoreBag(gt, gt, {"img0", "nope"}), ErrorCode::kInvalidArgument);
}

TEST(MultiviewTest, InvariantToGlobalSimilarity) {
  Random rng(13);
  const Reconstruction gt = RandomReconstruction(rng, 8);
  Reconstruction noisy;
  for (const auto& [id, pose] : gt) {
    CameraPose p = pose;
    p.rotation = RandomRotation(rng, DegToRad(rng.Uniform(0, 8))) * p.rotation;
    p.translation += 0.2 * Vec3(rng.Normal(), rng.Normal(), rng.Normal());
    noisy[id] = p;
  }
  noisy.erase("img3");
  const BagScore base = ScoreBag(noisy, gt, Ids(gt));
  const BagScore moved =
      ScoreBag(TransformWorld(noisy, 0.25, RandomRotation(rng, 2.5), Vec3(-3, 0, 7)), gt, Ids(gt));
  EXPECT_NEAR(moved.curve.mAA, base.curve.mAA, 1e-9);
  EXPECT_NEAR(*moved.ate, *base.ate, 1e-9);
}

TEST(MultiviewTest, AggregateAveragesBagsThenSizes) {
  BagScore one;
  one.curve = ComputeAccuracyCurve(std::vector<double>{0.0});
  one.ate = 1.0;
  BagScore zero;
  zero.curve = ComputeAccuracyCurve(std::vector<double>{kInf});
  const std::map<int, std::vector<BagScore>> by_size{{3, {one, zero}}, {5, {one}}};
  const MultiviewAggregate agg = AggregateBags(by_size);
  EXPECT_DOUBLE_EQ(agg.per_size.at(3).mAA, 0.5);
  EXPECT_DOUBLE_EQ(agg.per_size.at(5).mAA, 1.0);
  EXPECT_DOUBLE_EQ(agg.overall.mAA, 0.75);
  EXPECT_DOUBLE_EQ(*agg.ate_per_size.at(3), 1.0);
  EXPECT_DOUBLE_EQ(*agg.ate, 1.0);
}

struct RepeatabilityScene {
  CameraModel cam_i;
  CameraModel cam_j;
  DepthMap depth;
  KeypointList kp_i;
  KeypointList kp_j;
};

// Fronto-parallel plane at depth 4 seen by two cameras translated along x,
// so both depth maps are constant and keypoints of j are exact reprojections.
RepeatabilityScene PlaneScene() {
  RepeatabilityScene s;
  s.cam_i = MakeCamera(Mat3::Identity(), Vec3::Zero(), 200, 160, 120);
  s.cam_j = MakeCamera(Mat3::Identity(), Vec3(-0.3, 0, 0), 200, 160, 120);
  s.depth.width = 160;
  s.depth.height = 120;
  s.depth.values.assign(160 * 120, 4.0f);
  for (int y = 5; y < 115; y += 11) {
    for (int x = 3; x < 157; x += 9) {
      Keypoint k;
      k.x = x + 0.25;
      k.y = y + 0.5;
      s.kp_i.push_back(k);
      const Vec3 X = 4.0 * s.cam_i.intrinsics.inverse() * Vec3(k.x, k.y, 1.0);
      const Vec2 p = s.cam_j.Project(X);
      if (!s.cam_j.InImage(p)) continue;
      Keypoint kj;
      kj.x = p.x();
      kj.y = p.y();
      s.kp_j.push_back(kj);
    }
  }
  return s;
}

TEST(RepeatabilityTest, IdenticalViewIsFullyRepeatable) {
  RepeatabilityScene s = PlaneScene();
  const RepeatabilityInput in{&s.kp_i, &s.kp_i, &s.cam_i, &s.cam_i, &s.depth, &s.depth};
  EXPECT_DOUBLE_EQ(*Repeatability(in, 3.0), 1.0);
}

TEST(RepeatabilityTest, ExactReprojectionsAreRepeatable) {
  RepeatabilityScene s = PlaneScene();
  // Keep only keypoints of i visible in j so both directions are exact.
  KeypointList visible;
  for (const Keypoint& k : s.kp_i) {
    const Vec3 X = 4.0 * s.cam_i.intrinsics.inverse() * Vec3(k.x, k.y, 1.0);
    if (s.cam_j.InImage(s.cam_j.Project(X))) visible.push_back(k);
  }
  const RepeatabilityInput in{&visible, &s.kp_j, &s.cam_i, &s.cam_j, &s.depth, &s.depth};
  EXPECT_DOUBLE_EQ(*Repeatability(in, 1e-3), 1.0);
}

TEST(RepeatabilityTest, MatchingScoreNeverExceedsRepeatability) {
  Random rng(14);
  RepeatabilityScene s = PlaneScene();
  for (Keypoint& k : s.kp_j) {
    k.x += rng.Normal();
    k.y += rng.Normal();
  }
  const RepeatabilityInput in{&s.kp_i, &s.kp_j, &s.cam_i, &s.cam_j, &s.depth, &s.depth};
  for (int trial = 0; trial < 20; ++trial) {
    MatchList matches;
    for (int a = 0; a < static_cast<int>(s.kp_i.size()); ++a) {
      if (rng.Uniform01() < 0.5) {
        matches.entries.push_back(
            {a, static_cast<int>(rng.UniformInt(s.kp_j.size())), 0.0, std::nullopt});
      }
    }
    for (const double thr : {0.5, 1.0, 3.0}) {
      EXPECT_LE(*MatchingScore(in, matches, thr), *Repeatability(in, thr));
    }
  }
}

TEST(RepeatabilityTest, NoCovisibleKeypointsIsAbsent) {
  RepeatabilityScene s = PlaneScene();
  DepthMap invalid = s.depth;
  std::fill(invalid.values.begin(), invalid.values.end(), 0.0f);
  const RepeatabilityInput in{&s.kp_i, &s.kp_j, &s.cam_i, &s.cam_j, &invalid, &invalid};
  EXPECT_FALSE(Repeatability(in, 3.0).has_value());
  EXPECT_FALSE(MatchingScore(in, MatchList{}, 3.0).has_value());
}

}  // namespace
}  // namespace imb
