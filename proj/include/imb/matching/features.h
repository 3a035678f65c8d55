#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace imb {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 1.0;
  double orientation = 0.0;  // radians, [0, 2pi)
  double score = 0.0;

  bool operator==(const Keypoint&) const = default;
};

using KeypointList = std::vector<Keypoint>;

// Throws kValidation naming the first bad keypoint.
void ValidateKeypoints(const KeypointList& keypoints);

enum class DescriptorKind : uint8_t { kFloat32 = 0, kBinary = 1 };

// Row-major descriptors. Float rows hold `dim` floats compared with L2;
// binary rows hold `dim` bits packed into ceil(dim / 8) bytes (LSB first)
// compared with Hamming distance.
class DescriptorSet {
 public:
  DescriptorSet() = default;
  static DescriptorSet Float(int count, int dim, std::vector<float> data);
  static DescriptorSet Binary(int count, int dim_bits,
                              std::vector<uint8_t> data);

  int count() const { return count_; }
  int dim() const { return dim_; }
  DescriptorKind kind() const { return kind_; }
  int row_bytes() const;

  std::span<const float> FloatRow(int r) const;
  std::span<const uint8_t> BinaryRow(int r) const;
  const std::vector<float>& float_data() const { return floats_; }
  const std::vector<uint8_t>& binary_data() const { return bits_; }

  // Rows in the given order (used by feature-budget truncation).
  DescriptorSet SelectRows(std::span<const int> rows) const;

  // Metric distance between row a of *this and row b of other, accumulated
  // in double precision.
  double Distance(int a, const DescriptorSet& other, int b) const;

  bool operator==(const DescriptorSet& other) const;

 private:
  int count_ = 0;
  int dim_ = 0;
  DescriptorKind kind_ = DescriptorKind::kFloat32;
  std::vector<float> floats_;
  std::vector<uint8_t> bits_;
};

}  // namespace imb
