#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "imb/matching/features.h"
#include "imb/util/error.h"

namespace imb {

void ValidateKeypoints(const KeypointList& keypoints) {
  for (size_t k = 0; k < keypoints.size(); ++k) {
    const Keypoint& kp = keypoints[k];
    auto fail = [&](const char* what) {
      Throw(ErrorCode::kValidation,
            "keypoint " + std::to_string(k) + ": " + what);
    };
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
      fail("non-finite coordinates");
    }
    if (!std::isfinite(kp.score)) fail("non-finite score");
    if (!(kp.scale > 0.0) || !std::isfinite(kp.scale)) {
      fail("scale must be positive");
    }
    if (!(kp.orientation >= 0.0 && kp.orientation < 2.0 * M_PI)) {
      fail("orientation outside [0, 2pi)");
    }
  }
}

DescriptorSet DescriptorSet::Float(int count, int dim, std::vector<float> data) {
  IMB_CHECK_ARG(count >= 0 && dim >= 1, "bad descriptor shape");
  IMB_CHECK_ARG(data.size() == size_t(count) * size_t(dim),
                "descriptor data length != count * dim");
  DescriptorSet d;
  d.count_ = count;
  d.dim_ = dim;
  d.kind_ = DescriptorKind::kFloat32;
  d.floats_ = std::move(data);
  return d;
}

DescriptorSet DescriptorSet::Binary(int count, int dim_bits,
                                    std::vector<uint8_t> data) {
  IMB_CHECK_ARG(count >= 0 && dim_bits >= 1, "bad descriptor shape");
  const size_t row = (size_t(dim_bits) + 7) / 8;
  IMB_CHECK_ARG(data.size() == size_t(count) * row,
                "descriptor data length != count * row bytes");
  DescriptorSet d;
  d.count_ = count;
  d.dim_ = dim_bits;
  d.kind_ = DescriptorKind::kBinary;
  d.bits_ = std::move(data);
  // Padding bits must be zero so Hamming distances only see real bits.
  if (dim_bits % 8 != 0) {
    const uint8_t mask = static_cast<uint8_t>((1u << (dim_bits % 8)) - 1u);
    for (int r = 0; r < count; ++r) d.bits_[r * row + row - 1] &= mask;
  }
  return d;
}

int DescriptorSet::row_bytes() const {
  return kind_ == DescriptorKind::kBinary ? (dim_ + 7) / 8
                                          : dim_ * int(sizeof(float));
}

std::span<const float> DescriptorSet::FloatRow(int r) const {
  return {floats_.data() + size_t(r) * dim_, size_t(dim_)};
}

std::span<const uint8_t> DescriptorSet::BinaryRow(int r) const {
  const size_t row = (size_t(dim_) + 7) / 8;
  return {bits_.data() + size_t(r) * row, row};
}

DescriptorSet DescriptorSet::SelectRows(std::span<const int> rows) const {
  if (kind_ == DescriptorKind::kFloat32) {
    std::vector<float> data;
    data.reserve(rows.size() * dim_);
    for (const int r : rows) {
      const auto row = FloatRow(r);
      data.insert(data.end(), row.begin(), row.end());
    }
    return Float(static_cast<int>(rows.size()), dim_, std::move(data));
  }
  std::vector<uint8_t> data;
  for (const int r : rows) {
    const auto row = BinaryRow(r);
    data.insert(data.end(), row.begin(), row.end());
  }
  return Binary(static_cast<int>(rows.size()), dim_, std::move(data));
}

double DescriptorSet::Distance(int a, const DescriptorSet& other, int b) const {
  if (kind_ == DescriptorKind::kFloat32) {
    const float* p = floats_.data() + size_t(a) * dim_;
    const float* q = other.floats_.data() + size_t(b) * dim_;
    double acc = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double d = double(p[k]) - double(q[k]);
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  const auto p = BinaryRow(a);
  const auto q = other.BinaryRow(b);
  int bits = 0;
  for (size_t k = 0; k < p.size(); ++k) {
    bits += std::popcount(static_cast<uint8_t>(p[k] ^ q[k]));
  }
  return bits;
}

bool DescriptorSet::operator==(const DescriptorSet& other) const {
  if (count_ != other.count_ || dim_ != other.dim_ || kind_ != other.kind_) {
    return false;
  }
  if (kind_ == DescriptorKind::kBinary) return bits_ == other.bits_;
  return floats_.size() == other.floats_.size() &&
         std::memcmp(floats_.data(), other.floats_.data(),
                     floats_.size() * sizeof(float)) == 0;
}

}  // namespace imb
