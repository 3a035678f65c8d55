#include "imb/util/random.h"

#include <cmath>

#include "imb/util/error.h"

namespace imb {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidCalibration: return "invalid calibration";
    case ErrorCode::kDegenerateSample: return "degenerate sample";
    case ErrorCode::kNoIntersection: return "no intersection";
    case ErrorCode::kCheiralityUndecidable: return "cheirality undecidable";
    case ErrorCode::kInsufficientCorrespondences:
      return "insufficient correspondences";
    case ErrorCode::kEstimationFailed: return "estimation failed";
    case ErrorCode::kPureRotation: return "pure rotation pair";
    case ErrorCode::kNoPairs: return "no pairs";
    case ErrorCode::kAlignmentUnderdetermined:
      return "alignment underdetermined";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kSampling: return "sampling error";
  }
  return "unknown";
}

uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t HashCombine(uint64_t seed, uint64_t value) {
  return MixSeed(seed ^ MixSeed(value));
}

uint64_t HashString(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t Random::UniformInt(uint64_t n) {
  IMB_CHECK_ARG(n > 0, "empty range");
  // Rejection sampling on the top of the range removes modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Random::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Random::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * Uniform01() - 1.0;
    v = 2.0 * Uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::vector<int> Random::SampleWithoutReplacement(int n, int k) {
  std::vector<int> out(k);
  SampleWithoutReplacement(n, k, out.data());
  return out;
}

void Random::SampleWithoutReplacement(int n, int k, int* out) {
  IMB_CHECK_ARG(k >= 0 && k <= n, "sample larger than population");
  if (2 * k > n) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int s = 0; s < k; ++s) {
      const int pick = s + static_cast<int>(UniformInt(n - s));
      std::swap(pool[s], pool[pick]);
      out[s] = pool[s];
    }
    return;
  }
  // Rejection of repeats is cheap while k is small relative to n.
  for (int s = 0; s < k; ++s) {
    int candidate;
    bool repeated;
    do {
      candidate = static_cast<int>(UniformInt(static_cast<uint64_t>(n)));
      repeated = false;
      for (int t = 0; t < s; ++t) {
        if (out[t] == candidate) {
          repeated = true;
          break;
        }
      }
    } while (repeated);
    out[s] = candidate;
  }
}

}  // namespace imb
