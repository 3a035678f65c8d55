#include "imb/io/formats.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include "imb/util/error.h"
#include "imb/util/text_io.h"

namespace imb::io {
namespace {

constexpr char kMatchesTag[] = "#matches";
constexpr char kEmptyProvenance[] = "-";
constexpr uint32_t kMaxDescriptorDim = 1u << 20;
constexpr uint32_t kMaxDepthSide = 1u << 16;

// Line-oriented reader for the text formats. Every line must end in '\n'
// and blank lines are rejected, so each record has exactly one encoding.
class TextRecords {
 public:
  TextRecords(std::string_view text, const std::string& path)
      : text_(text), reader_(text), path_(path) {}

  bool Next(std::vector<std::string_view>* fields) {
    std::string_view line;
    if (!reader_.Next(&line)) return false;
    consumed_ += line.size() + 1;
    if (consumed_ > text_.size()) Fail("missing final newline");
    if (line.empty()) Fail("empty line");
    *fields = SplitFields(line);
    if (fields->empty()) Fail("blank line");
    return true;
  }

  void ExpectFields(const std::vector<std::string_view>& fields, size_t n) const {
    if (fields.size() != n) {
      Fail("expected " + std::to_string(n) + " fields, found " +
           std::to_string(fields.size()));
    }
  }

  double Finite(std::string_view token) const {
    const auto v = ParseDouble(token);
    if (!v || !std::isfinite(*v)) {
      Fail("not a finite number: '" + std::string(token) + "'");
    }
    return *v;
  }

  int64_t Integer(std::string_view token, int64_t lo, int64_t hi) const {
    const auto v = ParseInt(token);
    if (!v) Fail("not an integer: '" + std::string(token) + "'");
    if (*v < lo || *v > hi) {
      Fail("integer out of range: " + std::string(token));
    }
    return *v;
  }

  std::string Id(std::string_view token) const {
    if (!IsValidId(token)) Fail("invalid identifier");
    return std::string(token);
  }

  int line() const { return reader_.line_number(); }

  [[noreturn]] void FailAt(int line, const std::string& message) const {
    throw FormatError(path_ + ":line " + std::to_string(line), message);
  }
  [[noreturn]] void Fail(const std::string& message) const {
    FailAt(std::max(reader_.line_number(), 1), message);
  }

 private:
  std::string_view text_;
  LineReader reader_;
  const std::string& path_;
  size_t consumed_ = 0;
};

class BinaryReader {
 public:
  BinaryReader(std::string_view bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  void Magic(const char (&magic)[5]) {
    Need(4);
    if (bytes_.substr(0, 4) != std::string_view(magic, 4)) {
      Fail("bad magic, expected '" + std::string(magic) + "'");
    }
    pos_ = 4;
  }

  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= uint32_t(static_cast<uint8_t>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += 4;
    return v;
  }

  uint8_t U8() {
    Need(1);
    return static_cast<uint8_t>(bytes_[pos_++]);
  }

  float F32() { return std::bit_cast<float>(U32()); }

  size_t pos() const { return pos_; }
  size_t remaining() const { return bytes_.size() - pos_; }
  std::string_view Take(size_t n) {
    Need(n);
    const std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void ExpectPayload(uint64_t expected_total) const {
    if (bytes_.size() != expected_total) {
      FailAt(std::min<uint64_t>(bytes_.size(), expected_total),
             "expected " + std::to_string(expected_total) + " bytes, got " +
                 std::to_string(bytes_.size()));
    }
  }

  [[noreturn]] void FailAt(uint64_t offset, const std::string& message) const {
    throw FormatError(path_ + "@offset " + std::to_string(offset), message);
  }
  [[noreturn]] void Fail(const std::string& message) const { FailAt(pos_, message); }

 private:
  void Need(size_t n) const {
    if (remaining() < n) {
      FailAt(bytes_.size(), "truncated: need " + std::to_string(pos_ + n) +
                                " bytes, got " + std::to_string(bytes_.size()));
    }
  }

  std::string_view bytes_;
  const std::string& path_;
  size_t pos_ = 0;
};

void AppendU32(std::string* out, uint32_t v) {
  for (int b = 0; b < 4; ++b) out->push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void AppendRow(std::string* out, std::initializer_list<double> values) {
  bool first = true;
  for (const double v : values) {
    if (!first) out->push_back(' ');
    AppendDouble(out, v);
    first = false;
  }
  out->push_back('\n');
}

bool IsOrthonormal(const Mat3& R) {
  const double orth = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orth < 1e-9 && R.determinant() > 0.0;
}

bool IsToken(std::string_view s, bool allow_equals) {
  if (!IsValidId(s)) return false;
  for (const char c : s) {
    if (c == ';' || (!allow_equals && c == '=')) return false;
  }
  return true;
}

}  // namespace

bool IsValidId(std::string_view id) {
  if (id.empty()) return false;
  for (const char c : id) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7f) return false;
  }
  return true;
}

std::string SerializeCalibration(const CameraModel& camera) {
  std::string out = std::to_string(camera.width) + " " + std::to_string(camera.height) + "\n";
  const Mat3& K = camera.intrinsics;
  const Mat3& R = camera.rotation;
  for (int r = 0; r < 3; ++r) AppendRow(&out, {K(r, 0), K(r, 1), K(r, 2)});
  for (int r = 0; r < 3; ++r) AppendRow(&out, {R(r, 0), R(r, 1), R(r, 2)});
  const Vec3& t = camera.translation;
  AppendRow(&out, {t.x(), t.y(), t.z()});
  return out;
}

CameraModel ParseCalibration(std::string_view text, const std::string& path) {
  TextRecords in(text, path);
  std::vector<std::string_view> f;
  CameraModel camera;
  if (!in.Next(&f)) in.Fail("empty calibration file");
  in.ExpectFields(f, 2);
  camera.width = static_cast<int>(in.Integer(f[0], 1, std::numeric_limits<int>::max()));
  camera.height = static_cast<int>(in.Integer(f[1], 1, std::numeric_limits<int>::max()));
  auto read_rows = [&](Mat3* m) {
    for (int r = 0; r < 3; ++r) {
      if (!in.Next(&f)) in.Fail("truncated calibration file");
      in.ExpectFields(f, 3);
      for (int c = 0; c < 3; ++c) (*m)(r, c) = in.Finite(f[c]);
    }
  };
  read_rows(&camera.intrinsics);
  try {
    camera.Validate();
  } catch (const Error& e) {
    in.FailAt(2, e.what());
  }
  read_rows(&camera.rotation);
  try {
    camera.Validate();
  } catch (const Error& e) {
    in.FailAt(5, e.what());
  }
  if (!in.Next(&f)) in.Fail("truncated calibration file");
  in.ExpectFields(f, 3);
  for (int c = 0; c < 3; ++c) camera.translation(c) = in.Finite(f[c]);
  if (in.Next(&f)) in.Fail("trailing data after translation");
  return camera;
}

std::string SerializeKeypoints(const KeypointList& keypoints) {
  std::string out;
  out.reserve(keypoints.size() * 64);
  for (const Keypoint& kp : keypoints) {
    AppendRow(&out, {kp.x, kp.y, kp.scale, kp.orientation, kp.score});
  }
  return out;
}

KeypointList ParseKeypoints(std::string_view text, const std::string& path) {
  TextRecords in(text, path);
  std::vector<std::string_view> f;
  KeypointList keypoints;
  while (in.Next(&f)) {
    in.ExpectFields(f, 5);
    Keypoint kp{in.Finite(f[0]), in.Finite(f[1]), in.Finite(f[2]),
                in.Finite(f[3]), in.Finite(f[4])};
    try {
      ValidateKeypoints({kp});
    } catch (const Error& e) {
      in.Fail(e.what());
    }
    keypoints.push_back(kp);
  }
  return keypoints;
}

std::string SerializeDescriptors(const DescriptorSet& d) {
  std::string out = "DESC";
  AppendU32(&out, kDescriptorFormatVersion);
  AppendU32(&out, static_cast<uint32_t>(d.count()));
  AppendU32(&out, static_cast<uint32_t>(d.dim()));
  out.push_back(static_cast<char>(d.kind()));
  if (d.kind() == DescriptorKind::kFloat32) {
    out.reserve(out.size() + d.float_data().size() * 4);
    for (const float v : d.float_data()) AppendU32(&out, std::bit_cast<uint32_t>(v));
  } else {
    out.append(reinterpret_cast<const char*>(d.binary_data().data()),
               d.binary_data().size());
  }
  return out;
}

DescriptorSet ParseDescriptors(std::string_view bytes, const std::string& path) {
  BinaryReader in(bytes, path);
  in.Magic("DESC");
  const uint32_t version = in.U32();
  if (version != kDescriptorFormatVersion) {
    in.FailAt(4, "unsupported version " + std::to_string(version));
  }
  const uint32_t count = in.U32();
  if (count > uint32_t(std::numeric_limits<int>::max())) in.FailAt(8, "count too large");
  const uint32_t dim = in.U32();
  if (dim == 0 || dim > kMaxDescriptorDim) {
    in.FailAt(12, "descriptor dimension out of range: " + std::to_string(dim));
  }
  const uint8_t kind = in.U8();
  if (kind > 1) in.FailAt(16, "unknown descriptor kind " + std::to_string(kind));
  const uint64_t row = kind == 0 ? uint64_t(dim) * 4 : (uint64_t(dim) + 7) / 8;
  in.ExpectPayload(in.pos() + uint64_t(count) * row);
  if (kind == 0) {
    std::vector<float> data(size_t(count) * dim);
    for (size_t k = 0; k < data.size(); ++k) {
      const size_t offset = in.pos();
      data[k] = in.F32();
      if (!std::isfinite(data[k])) in.FailAt(offset, "non-finite descriptor value");
    }
    return DescriptorSet::Float(static_cast<int>(count), static_cast<int>(dim),
                                std::move(data));
  }
  const size_t start = in.pos();
  const std::string_view payload = in.Take(size_t(count) * row);
  std::vector<uint8_t> data(payload.begin(), payload.end());
  if (dim % 8 != 0) {
    const uint8_t pad = static_cast<uint8_t>(~((1u << (dim % 8)) - 1u));
    for (uint32_t r = 0; r < count; ++r) {
      const size_t last = size_t(r) * row + row - 1;
      if (data[last] & pad) in.FailAt(start + last, "nonzero padding bits");
    }
  }
  return DescriptorSet::Binary(static_cast<int>(count), static_cast<int>(dim),
                               std::move(data));
}

std::string SerializeDepth(const DepthMap& depth) {
  std::string out = "DPTH";
  AppendU32(&out, static_cast<uint32_t>(depth.width));
  AppendU32(&out, static_cast<uint32_t>(depth.height));
  out.reserve(out.size() + depth.values.size() * 4);
  for (const float v : depth.values) AppendU32(&out, std::bit_cast<uint32_t>(v));
  return out;
}

DepthMap ParseDepth(std::string_view bytes, const std::string& path) {
  BinaryReader in(bytes, path);
  in.Magic("DPTH");
  const uint32_t w = in.U32();
  if (w == 0 || w > kMaxDepthSide) in.FailAt(4, "width out of range");
  const uint32_t h = in.U32();
  if (h == 0 || h > kMaxDepthSide) in.FailAt(8, "height out of range");
  in.ExpectPayload(in.pos() + uint64_t(w) * h * 4);
  DepthMap depth;
  depth.width = static_cast<int>(w);
  depth.height = static_cast<int>(h);
  depth.values.resize(size_t(w) * h);
  for (float& v : depth.values) {
    const size_t offset = in.pos();
    v = in.F32();
    if (!std::isfinite(v)) in.FailAt(offset, "non-finite depth value");
  }
  return depth;
}

std::string SerializeObservations(const ObservationTable& table) {
  std::string out;
  for (const auto& [point, entries] : table) {
    for (const ObservationEntry& e : entries) {
      out += std::to_string(point);
      out += ' ';
      out += e.image_id;
      out += ' ';
      AppendRow(&out, {e.x, e.y});
    }
  }
  return out;
}

ObservationTable ParseObservations(std::string_view text, const std::string& path) {
  TextRecords in(text, path);
  std::vector<std::string_view> f;
  ObservationTable table;
  std::set<std::pair<int64_t, std::string>> seen;
  while (in.Next(&f)) {
    in.ExpectFields(f, 4);
    const int64_t point = in.Integer(f[0], 0, std::numeric_limits<int64_t>::max());
    ObservationEntry e{in.Id(f[1]), in.Finite(f[2]), in.Finite(f[3])};
    if (!seen.emplace(point, e.image_id).second) {
      in.Fail("duplicate observation of point " + std::to_string(point) +
              " in image " + e.image_id);
    }
    table[point].push_back(std::move(e));
  }
  return table;
}

std::string SerializeMatches(const MatchList& matches) {
  for (const auto& [stage, param] : matches.provenance) {
    IMB_CHECK_ARG(IsToken(stage, false) && stage != kEmptyProvenance,
                  "provenance stage '" + stage + "' is not serializable");
    IMB_CHECK_ARG(param.empty() || IsToken(param, false),
                  "provenance parameter '" + param + "' is not serializable");
  }
  const std::string provenance = matches.ProvenanceString();
  std::string out = std::string(kMatchesTag) + " " +
                    MatchDirectionName(matches.direction) + " " +
                    (provenance.empty() ? kEmptyProvenance : provenance) + "\n";
  for (const Match& m : matches.entries) {
    out += std::to_string(m.index_i);
    out += ' ';
    out += std::to_string(m.index_j);
    out += ' ';
    AppendRow(&out, {m.distance});
  }
  return out;
}

MatchList ParseMatches(std::string_view text, const std::string& path) {
  TextRecords in(text, path);
  std::vector<std::string_view> f;
  MatchList matches;
  if (!in.Next(&f)) in.Fail("missing header");
  in.ExpectFields(f, 3);
  if (f[0] != kMatchesTag) in.Fail("header must start with " + std::string(kMatchesTag));
  bool known = false;
  for (const MatchDirection d : {MatchDirection::kIToJ, MatchDirection::kJToI,
                                 MatchDirection::kBoth, MatchDirection::kEither}) {
    if (f[1] == MatchDirectionName(d)) {
      matches.direction = d;
      known = true;
    }
  }
  if (!known) in.Fail("unknown match direction '" + std::string(f[1]) + "'");
  if (f[2] != kEmptyProvenance) {
    std::string_view rest = f[2];
    while (true) {
      const size_t semi = rest.find(';');
      const std::string_view item = rest.substr(0, semi);
      const size_t eq = item.find('=');
      std::string stage(item.substr(0, eq));
      std::string param = eq == std::string_view::npos ? "" : std::string(item.substr(eq + 1));
      if (!IsToken(stage, false) || stage == kEmptyProvenance ||
          (eq != std::string_view::npos && !IsToken(param, false))) {
        in.Fail("malformed provenance");
      }
      matches.provenance.emplace_back(std::move(stage), std::move(param));
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
    }
  }
  std::set<int> seen_i, seen_j;
  std::set<std::pair<int, int>> seen;
  while (in.Next(&f)) {
    in.ExpectFields(f, 3);
    Match m;
    m.index_i = static_cast<int>(in.Integer(f[0], 0, std::numeric_limits<int>::max()));
    m.index_j = static_cast<int>(in.Integer(f[1], 0, std::numeric_limits<int>::max()));
    m.distance = in.Finite(f[2]);
    if (m.distance < 0.0) in.Fail("negative match distance");
    bool fresh = true;
    switch (matches.direction) {
      case MatchDirection::kIToJ: fresh = seen_i.insert(m.index_i).second; break;
      case MatchDirection::kJToI: fresh = seen_j.insert(m.index_j).second; break;
      case MatchDirection::kBoth:
        fresh = seen_i.insert(m.index_i).second && seen_j.insert(m.index_j).second;
        break;
      case MatchDirection::kEither: fresh = seen.insert({m.index_i, m.index_j}).second; break;
    }
    if (!fresh) {
      in.Fail("match repeats an index, not allowed for direction " +
              MatchDirectionName(matches.direction));
    }
    matches.entries.push_back(m);
  }
  return matches;
}

std::string SerializeReconstruction(const Reconstruction& reconstruction) {
  std::string out;
  for (const auto& [id, pose] : reconstruction) {
    IMB_CHECK_ARG(IsValidId(id), "image id '" + id + "' is not serializable");
    out += id;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out += ' ';
        AppendDouble(&out, pose.rotation(r, c));
      }
    }
    for (int k = 0; k < 3; ++k) {
      out += ' ';
      AppendDouble(&out, pose.translation(k));
    }
    out += '\n';
  }
  return out;
}

Reconstruction ParseReconstruction(std::string_view text, const std::string& path) {
  TextRecords in(text, path);
  std::vector<std::string_view> f;
  Reconstruction reconstruction;
  while (in.Next(&f)) {
    in.ExpectFields(f, 13);
    const std::string id = in.Id(f[0]);
    CameraPose pose;
    for (int k = 0; k < 9; ++k) pose.rotation(k / 3, k % 3) = in.Finite(f[1 + k]);
    for (int k = 0; k < 3; ++k) pose.translation(k) = in.Finite(f[10 + k]);
    if (!IsOrthonormal(pose.rotation)) in.Fail("rotation not orthonormal");
    if (!reconstruction.emplace(id, pose).second) in.Fail("duplicate image " + id);
  }
  return reconstruction;
}

std::string SerializePairs(const std::vector<PairEntry>& pairs) {
  std::string out;
  for (const PairEntry& p : pairs) {
    out += p.image_i;
    out += ' ';
    out += p.image_j;
    out += ' ';
    AppendRow(&out, {p.covisibility});
  }
  return out;
}

std::vector<PairEntry> ParsePairs(std::string_view text, const std::string& path) {
  TextRecords in(text, path);
  std::vector<std::string_view> f;
  std::vector<PairEntry> pairs;
  while (in.Next(&f)) {
    in.ExpectFields(f, 3);
    PairEntry p{in.Id(f[0]), in.Id(f[1]), in.Finite(f[2])};
    if (p.image_i == p.image_j) in.Fail("pair of an image with itself");
    if (p.covisibility < 0.0 || p.covisibility > 1.0) {
      in.Fail("co-visibility outside [0, 1]");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace imb::io
