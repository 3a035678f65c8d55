#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "imb/geometry/types.h"
#include "imb/synthetic/scene_generator.h"
#include "imb/util/error.h"
#include "imb/util/random.h"

// Asserts that `stmt` throws imb::Error with the given code.
#define EXPECT_IMB_ERROR(stmt, expected_code)                                \
  do {                                                                       \
    try {                                                                    \
      stmt;                                                                  \
      ADD_FAILURE() << "no exception from " #stmt;                           \
    } catch (const ::imb::Error& e_) {                                       \
      EXPECT_EQ(::imb::ErrorCodeName(e_.code()),                             \
                ::imb::ErrorCodeName(expected_code))                         \
          << e_.what();                                                      \
    }                                                                        \
  } while (false)

namespace imb::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline double RadToDeg(double r) { return r * 180.0 / kPi; }
inline double DegToRad(double d) { return d * kPi / 180.0; }

inline CameraModel MakeCamera(const Mat3& R, const Vec3& t, double f = 800.0, int w = 1024,
                              int h = 768) {
  CameraModel cam;
  cam.intrinsics << f, 0, w / 2.0, 0, f, h / 2.0, 0, 0, 1;
  cam.rotation = R;
  cam.translation = t;
  cam.width = w;
  cam.height = h;
  return cam;
}

// Exact F = K_j^-T [t]x R K_i^-1 of two cameras.
inline Mat3 TrueFundamental(const CameraModel& ci, const CameraModel& cj) {
  const RelativeMotion m = RelativeMotionBetween(ci, cj);
  const Mat3 E = Skew(m.translation) * m.rotation;
  return cj.intrinsics.inverse().transpose() * E * ci.intrinsics.inverse();
}

// Noise-free inlier pair with `n` correspondences.
inline SyntheticPair CleanPair(uint64_t seed, int n = 100) {
  Random rng(seed);
  PairSynthSpec spec;
  spec.num_inliers = n;
  return SynthesizePair(spec, rng);
}

// Fresh scratch directory under the build tree, removed on destruction.
class TempDir {
 public:
  // Unique per test, so tests may run concurrently.
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("imb_test_" + CurrentTestName() + "_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }

 private:
  static std::string CurrentTestName() {
    const ::testing::TestInfo* info = ::testing::UnitTest::GetInstance()->current_test_info();
    return info == nullptr ? "none" : std::string(info->test_suite_name()) + "_" + info->name();
  }

  std::filesystem::path path_;
};

}  // namespace imb::testing
