#include "imb/harness/config.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <type_traits>

#include "imb/util/error.h"
#include "imb/util/text_io.h"

namespace imb {

using nlohmann::ordered_json;

std::string MatchingModeName(MatchingMode mode) {
  switch (mode) {
    case MatchingMode::kUni: return "uni";
    case MatchingMode::kBoth: return "both";
    case MatchingMode::kEither: return "either";
  }
  return "?";
}

MatchingMode ParseMatchingMode(const std::string& name) {
  if (name == "uni") return MatchingMode::kUni;
  if (name == "both") return MatchingMode::kBoth;
  if (name == "either") return MatchingMode::kEither;
  Throw(ErrorCode::kInvalidArgument, "unknown matching mode: " + name);
}

std::string MatchingConfig::Key() const {
  std::string key = "k=" + std::to_string(feature_budget) + ";mode=" + MatchingModeName(mode) +
                    ";ratio=" + FormatDouble(ratio);
  if (fginn) key += ";fginn=" + FormatDouble(min_geom_dist);
  if (max_distance) key += ";maxdist=" + FormatDouble(*max_distance);
  return key;
}

void RunConfig::Validate() const {
  std::vector<std::string> problems;
  if (data_root.empty()) problems.push_back("data root is empty");
  if (scenes.empty()) problems.push_back("no scenes given");
  if (std::set<std::string>(scenes.begin(), scenes.end()).size() != scenes.size()) {
    problems.push_back("scene list has duplicates");
  }
  if (method.empty()) problems.push_back("feature method is empty");
  if (matching.feature_budget < 0) problems.push_back("feature budget must be >= 0");
  if (!(matching.ratio >= 0.0 && matching.ratio <= 1.0)) {
    problems.push_back("ratio must be in [0, 1]");
  }
  if (!(matching.min_geom_dist >= 0.0)) problems.push_back("min geom dist must be >= 0");
  if (matching.max_distance && !(*matching.max_distance >= 0.0)) {
    problems.push_back("max distance must be >= 0");
  }
  if (!(min_covisibility >= 0.0 && min_covisibility <= 1.0)) {
    problems.push_back("co-visibility threshold must be in [0, 1]");
  }
  if (num_threads < 1) problems.push_back("thread count must be >= 1");
  if (repeats < 1) problems.push_back("repeat count must be >= 1");
  try {
    ransac.Validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  if (problems.empty()) return;
  std::string message = "invalid run config:";
  for (const std::string& p : problems) message += "\n  " + p;
  Throw(ErrorCode::kValidation, message);
}

int DefaultNumThreads() {
  const char* env = std::getenv("IMB_NUM_THREADS");
  if (env == nullptr) return 1;
  const std::optional<int64_t> n = ParseInt(env);
  if (!n || *n < 1 || *n > 1024) return 1;
  return static_cast<int>(*n);
}

ordered_json ToJson(const RansacConfig& c) {
  ordered_json j;
  j["variant"] = RansacVariantName(c.variant);
  j["confidence"] = c.confidence;
  j["threshold"] = c.threshold;
  j["max_iterations"] = c.max_iterations;
  j["residual"] = c.residual == ResidualKind::kSampson ? "sampson" : "symmetric";
  j["local_optimization"] = c.local_optimization;
  j["lo_max_rounds"] = c.lo_max_rounds;
  j["degeneracy_min_plane_inliers"] = c.degeneracy_min_plane_inliers;
  j["plane_parallax_max_iterations"] = c.plane_parallax_max_iterations;
  return j;
}

ordered_json ToJson(const MatchingConfig& c) {
  ordered_json j;
  j["feature_budget"] = c.feature_budget;
  j["mode"] = MatchingModeName(c.mode);
  j["ratio"] = c.ratio;
  j["fginn"] = c.fginn;
  j["min_geom_dist"] = c.min_geom_dist;
  j["max_distance"] = c.max_distance ? ordered_json(*c.max_distance) : ordered_json(nullptr);
  return j;
}

ordered_json ToJson(const RunConfig& c) {
  ordered_json j;
  j["data_root"] = c.data_root;
  j["scenes"] = c.scenes;
  j["method"] = c.method;
  j["matching"] = ToJson(c.matching);
  j["ransac"] = ToJson(c.ransac);
  j["error_mode"] = ErrorCombinationName(c.error_mode);
  j["min_covisibility"] = c.min_covisibility;
  j["seed"] = c.seed;
  j["repeats"] = c.repeats;
  return j;
}

ordered_json ToJson(const SynthSpec& s) {
  ordered_json j;
  j["scene_name"] = s.scene_name;
  j["method_name"] = s.method_name;
  j["num_cameras"] = s.num_cameras;
  j["num_points"] = s.num_points;
  j["planar_fraction"] = s.planar_fraction;
  j["keypoint_noise_px"] = s.keypoint_noise_px;
  j["descriptor_dim"] = s.descriptor_dim;
  j["descriptor_noise"] = s.descriptor_noise;
  j["outlier_fraction"] = s.outlier_fraction;
  j["image_width"] = s.image_width;
  j["image_height"] = s.image_height;
  j["focal_px"] = s.focal_px;
  j["ring_radius"] = s.ring_radius;
  j["ring_height"] = s.ring_height;
  j["ring_arc_deg"] = s.ring_arc_deg;
  j["camera_jitter"] = s.camera_jitter;
  j["cloud_radius"] = s.cloud_radius;
  j["plane_radius"] = s.plane_radius;
  j["render_depth"] = s.render_depth;
  j["depth_splat_radius"] = s.depth_splat_radius;
  j["seed"] = s.seed;
  return j;
}

namespace {

// Reads optional keys of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const ordered_json& j, std::string context)
      : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) Fail("expected a JSON object");
  }

  template <typename T>
  void Get(const std::string& key, T* out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const ordered_json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) Fail(key + ": expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) Fail(key + ": expected a string");
    } else if constexpr (std::is_same_v<T, uint64_t>) {
      if (!v.is_number_unsigned()) Fail(key + ": expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) Fail(key + ": expected an integer");
      const int64_t x = v.get<int64_t>();
      if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
        Fail(key + ": integer out of range");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) Fail(key + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) Fail(key + ": expected an array of strings");
      for (const auto& e : v) {
        if (!e.is_string()) Fail(key + ": expected an array of strings");
      }
    }
    *out = v.get<T>();
  }

  void GetOptionalDouble(const std::string& key, std::optional<double>* out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const ordered_json& v = j_.at(key);
    if (v.is_null()) {
      out->reset();
    } else if (v.is_number()) {
      *out = v.get<double>();
    } else {
      Fail(key + ": expected a number or null");
    }
  }

  const ordered_json* Child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) Fail("unknown key \"" + key + "\"");
    }
  }

  [[noreturn]] void Fail(const std::string& message) const {
    Throw(ErrorCode::kValidation, context_ + ": " + message);
  }

 private:
  const ordered_json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

template <typename Parse>
auto ParseName(const ObjectReader& r, const std::string& key, const std::string& value,
               Parse parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    r.Fail(key + ": " + e.what());
  }
}

}  // namespace

RansacConfig RansacConfigFromJson(const ordered_json& j) {
  RansacConfig c;
  ObjectReader r(j, "ransac");
  std::string variant = RansacVariantName(c.variant);
  std::string residual = "symmetric";
  r.Get("variant", &variant);
  r.Get("confidence", &c.confidence);
  r.Get("threshold", &c.threshold);
  r.Get("max_iterations", &c.max_iterations);
  r.Get("residual", &residual);
  r.Get("local_optimization", &c.local_optimization);
  r.Get("lo_max_rounds", &c.lo_max_rounds);
  r.Get("degeneracy_min_plane_inliers", &c.degeneracy_min_plane_inliers);
  r.Get("plane_parallax_max_iterations", &c.plane_parallax_max_iterations);
  r.Finish();
  c.variant = ParseName(r, "variant", variant, ParseRansacVariant);
  if (residual == "symmetric") {
    c.residual = ResidualKind::kSymmetricEpipolar;
  } else if (residual == "sampson") {
    c.residual = ResidualKind::kSampson;
  } else {
    r.Fail("residual: unknown residual " + residual);
  }
  return c;
}

MatchingConfig MatchingConfigFromJson(const ordered_json& j) {
  MatchingConfig c;
  ObjectReader r(j, "matching");
  std::string mode = MatchingModeName(c.mode);
  r.Get("feature_budget", &c.feature_budget);
  r.Get("mode", &mode);
  r.Get("ratio", &c.ratio);
  r.Get("fginn", &c.fginn);
  r.Get("min_geom_dist", &c.min_geom_dist);
  r.GetOptionalDouble("max_distance", &c.max_distance);
  r.Finish();
  c.mode = ParseName(r, "mode", mode, ParseMatchingMode);
  return c;
}

RunConfig RunConfigFromJson(const ordered_json& j) {
  RunConfig c;
  ObjectReader r(j, "config");
  std::string error_mode = ErrorCombinationName(c.error_mode);
  r.Get("data_root", &c.data_root);
  r.Get("scenes", &c.scenes);
  r.Get("method", &c.method);
  r.Get("error_mode", &error_mode);
  r.Get("min_covisibility", &c.min_covisibility);
  r.Get("seed", &c.seed);
  r.Get("repeats", &c.repeats);
  r.Get("num_threads", &c.num_threads);
  r.Get("output_dir", &c.output_dir);
  if (const ordered_json* m = r.Child("matching")) c.matching = MatchingConfigFromJson(*m);
  if (const ordered_json* m = r.Child("ransac")) c.ransac = RansacConfigFromJson(*m);
  r.Finish();
  c.error_mode = ParseName(r, "error_mode", error_mode, ParseErrorCombination);
  return c;
}

SynthSpec SynthSpecFromJson(const ordered_json& j) {
  SynthSpec s;
  ObjectReader r(j, "synth spec");
  r.Get("scene_name", &s.scene_name);
  r.Get("method_name", &s.method_name);
  r.Get("num_cameras", &s.num_cameras);
  r.Get("num_points", &s.num_points);
  r.Get("planar_fraction", &s.planar_fraction);
  r.Get("keypoint_noise_px", &s.keypoint_noise_px);
  r.Get("descriptor_dim", &s.descriptor_dim);
  r.Get("descriptor_noise", &s.descriptor_noise);
  r.Get("outlier_fraction", &s.outlier_fraction);
  r.Get("image_width", &s.image_width);
  r.Get("image_height", &s.image_height);
  r.Get("focal_px", &s.focal_px);
  r.Get("ring_radius", &s.ring_radius);
  r.Get("ring_height", &s.ring_height);
  r.Get("ring_arc_deg", &s.ring_arc_deg);
  r.Get("camera_jitter", &s.camera_jitter);
  r.Get("cloud_radius", &s.cloud_radius);
  r.Get("plane_radius", &s.plane_radius);
  r.Get("render_depth", &s.render_depth);
  r.Get("depth_splat_radius", &s.depth_splat_radius);
  r.Get("seed", &s.seed);
  r.Finish();
  return s;
}

}  // namespace imb
