#include "imb/io/scene.h"

#include <algorithm>
#include <filesystem>
#include <set>

#include "imb/metrics/covisibility.h"
#include "imb/util/error.h"
#include "imb/util/text_io.h"

namespace imb {
namespace fs = std::filesystem;
namespace {

bool IsFileId(const std::string& id) {
  return io::IsValidId(id) && id != "." && id != ".." &&
         id.find('/') == std::string::npos && id.find('\\') == std::string::npos;
}

struct Layout {
  fs::path dir;

  fs::path Calib(const std::string& id) const { return dir / "calib" / (id + ".txt"); }
  fs::path Keypoints(const std::string& m, const std::string& id) const {
    return dir / "keypoints" / m / (id + ".txt");
  }
  fs::path Descriptors(const std::string& m, const std::string& id) const {
    return dir / "descriptors" / m / (id + ".desc");
  }
  fs::path Depth(const std::string& id) const { return dir / "depth" / (id + ".dpth"); }
  fs::path Observations() const { return dir / "observations.txt"; }
  fs::path Pairs() const { return dir / "pairs.txt"; }
};

// Sorted stems of regular files with the given extension.
std::vector<std::string> ListStems(const fs::path& dir, const std::string& ext) {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.push_back(entry.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ListSubdirs(const fs::path& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> FeatureMethods(const Layout& layout) {
  std::set<std::string> methods;
  for (const auto& m : ListSubdirs(layout.dir / "keypoints")) methods.insert(m);
  for (const auto& m : ListSubdirs(layout.dir / "descriptors")) methods.insert(m);
  return {methods.begin(), methods.end()};
}

std::string JoinLines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += "\n  " + s;
  return out;
}

}  // namespace

int SceneBundle::ImageIndex(const std::string& id) const {
  const auto it = std::lower_bound(
      images.begin(), images.end(), id,
      [](const SceneImage& im, const std::string& key) { return im.id < key; });
  if (it == images.end() || it->id != id) return -1;
  return static_cast<int>(it - images.begin());
}

const FeatureSet& SceneBundle::Features(const std::string& method,
                                        const std::string& image_id) const {
  const auto m = features.find(method);
  if (m == features.end()) {
    Throw(ErrorCode::kInvalidArgument, "scene " + name + " has no features '" + method + "'");
  }
  const auto f = m->second.find(image_id);
  if (f == m->second.end()) {
    Throw(ErrorCode::kInvalidArgument,
          "no " + method + " features for image " + image_id);
  }
  return f->second;
}

void SceneBundle::Validate() const {
  std::vector<std::string> problems;
  if (!IsFileId(name)) problems.push_back("invalid scene name '" + name + "'");
  for (size_t k = 0; k < images.size(); ++k) {
    const SceneImage& im = images[k];
    if (!IsFileId(im.id)) problems.push_back("invalid image id '" + im.id + "'");
    if (k > 0 && !(images[k - 1].id < im.id)) {
      problems.push_back("images not strictly sorted at '" + im.id + "'");
    }
    try {
      im.camera.Validate();
    } catch (const Error& e) {
      problems.push_back("image " + im.id + ": " + e.what());
    }
    if (im.depth) {
      if (im.depth->width != im.camera.width || im.depth->height != im.camera.height) {
        problems.push_back("image " + im.id + ": depth map size differs from image size");
      }
      if (im.depth->values.size() != size_t(im.depth->width) * im.depth->height) {
        problems.push_back("image " + im.id + ": depth value count mismatch");
      }
    }
  }
  for (const auto& [method, per_image] : features) {
    if (!IsFileId(method)) problems.push_back("invalid feature method '" + method + "'");
    for (const SceneImage& im : images) {
      if (!per_image.count(im.id)) {
        problems.push_back(method + ": no features for image " + im.id);
      }
    }
    for (const auto& [id, fset] : per_image) {
      if (ImageIndex(id) < 0) problems.push_back(method + ": features for unknown image " + id);
      if (fset.descriptors.count() != static_cast<int>(fset.keypoints.size())) {
        problems.push_back(method + "/" + id + ": " +
                           std::to_string(fset.keypoints.size()) + " keypoints but " +
                           std::to_string(fset.descriptors.count()) + " descriptors");
      }
      try {
        ValidateKeypoints(fset.keypoints);
      } catch (const Error& e) {
        problems.push_back(method + "/" + id + ": " + e.what());
      }
    }
  }
  for (const auto& [point, entries] : observations) {
    std::set<std::string> seen;
    for (const io::ObservationEntry& e : entries) {
      if (ImageIndex(e.image_id) < 0) {
        problems.push_back("point " + std::to_string(point) + " observed in unknown image " +
                           e.image_id);
      }
      if (!seen.insert(e.image_id).second) {
        problems.push_back("point " + std::to_string(point) + " observed twice in " +
                           e.image_id);
      }
    }
  }
  const size_t n = images.size();
  if (pairs.size() != n * (n - (n > 0 ? 1 : 0)) / 2) {
    problems.push_back("pair list has " + std::to_string(pairs.size()) + " entries, expected " +
                       std::to_string(n * (n - (n > 0 ? 1 : 0)) / 2));
  } else {
    size_t k = 0;
    for (size_t a = 0; a < n && k < pairs.size(); ++a) {
      for (size_t b = a + 1; b < n; ++b, ++k) {
        const io::PairEntry& p = pairs[k];
        if (p.image_i != images[a].id || p.image_j != images[b].id) {
          problems.push_back("pair " + std::to_string(k) + " is (" + p.image_i + ", " +
                             p.image_j + "), expected (" + images[a].id + ", " +
                             images[b].id + ")");
          a = n;
          break;
        }
        if (!(p.covisibility >= 0.0 && p.covisibility <= 1.0)) {
          problems.push_back("pair " + std::to_string(k) + " co-visibility outside [0, 1]");
        }
      }
    }
  }
  if (!problems.empty()) {
    Throw(ErrorCode::kValidation, "scene " + name + " is invalid:" + JoinLines(problems));
  }
}

std::vector<io::PairEntry> ComputePairCovisibility(
    const std::vector<SceneImage>& images, const io::ObservationTable& observations) {
  const size_t n = images.size();
  std::map<std::string, size_t> index;
  for (size_t k = 0; k < n; ++k) index[images[k].id] = k;
  // Per image: point id -> location, for intersecting observation sets.
  std::vector<std::map<int64_t, Vec2>> located(n);
  for (const auto& [point, entries] : observations) {
    for (const io::ObservationEntry& e : entries) {
      const auto it = index.find(e.image_id);
      if (it != index.end()) located[it->second][point] = Vec2(e.x, e.y);
    }
  }
  std::vector<io::PairEntry> pairs;
  pairs.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  std::vector<Vec2> obs_i, obs_j;
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a + 1; b < n; ++b) {
      obs_i.clear();
      obs_j.clear();
      auto ia = located[a].begin();
      auto ib = located[b].begin();
      while (ia != located[a].end() && ib != located[b].end()) {
        if (ia->first < ib->first) {
          ++ia;
        } else if (ib->first < ia->first) {
          ++ib;
        } else {
          obs_i.push_back(ia->second);
          obs_j.push_back(ib->second);
          ++ia;
          ++ib;
        }
      }
      const CameraModel& ca = images[a].camera;
      const CameraModel& cb = images[b].camera;
      pairs.push_back({images[a].id, images[b].id,
                       CoVisibility(obs_i, ca.width, ca.height, obs_j, cb.width, cb.height)});
    }
  }
  return pairs;
}

Reconstruction GroundTruthPoses(const SceneBundle& scene) {
  Reconstruction poses;
  for (const SceneImage& im : scene.images) {
    poses[im.id] = CameraPose{im.camera.rotation, im.camera.translation};
  }
  return poses;
}

std::vector<std::string> MissingSceneFiles(const std::string& root, const std::string& scene) {
  const Layout layout{fs::path(root) / scene};
  std::vector<std::string> missing;
  std::error_code ec;
  if (!fs::is_directory(layout.dir, ec)) return {layout.dir.string()};
  const std::vector<std::string> ids = ListStems(layout.dir / "calib", ".txt");
  if (ids.empty()) missing.push_back((layout.dir / "calib" / "<id>.txt").string());
  for (const std::string& method : FeatureMethods(layout)) {
    for (const std::string& id : ids) {
      if (!fs::is_regular_file(layout.Keypoints(method, id), ec)) {
        missing.push_back(layout.Keypoints(method, id).string());
      }
      if (!fs::is_regular_file(layout.Descriptors(method, id), ec)) {
        missing.push_back(layout.Descriptors(method, id).string());
      }
    }
  }
  if (!fs::is_regular_file(layout.Observations(), ec)) {
    missing.push_back(layout.Observations().string());
  }
  return missing;
}

SceneBundle LoadScene(const std::string& root, const std::string& scene) {
  const std::vector<std::string> missing = MissingSceneFiles(root, scene);
  if (!missing.empty()) {
    Throw(ErrorCode::kValidation,
          "scene " + scene + " is missing " + std::to_string(missing.size()) +
              " file(s):" + JoinLines(missing));
  }
  const Layout layout{fs::path(root) / scene};
  SceneBundle bundle;
  bundle.name = scene;
  std::error_code ec;
  for (const std::string& id : ListStems(layout.dir / "calib", ".txt")) {
    if (!IsFileId(id)) {
      Throw(ErrorCode::kValidation, "invalid image id '" + id + "' in " +
                                        (layout.dir / "calib").string());
    }
    SceneImage im;
    im.id = id;
    const std::string calib_path = layout.Calib(id).string();
    im.camera = io::ParseCalibration(ReadFileBytes(calib_path), calib_path);
    const fs::path depth_path = layout.Depth(id);
    if (fs::is_regular_file(depth_path, ec)) {
      const std::string p = depth_path.string();
      im.depth = io::ParseDepth(ReadFileBytes(p), p);
      if (im.depth->width != im.camera.width || im.depth->height != im.camera.height) {
        throw FormatError(p + "@offset 4",
                          "depth map is " + std::to_string(im.depth->width) + "x" +
                              std::to_string(im.depth->height) + " but " + calib_path +
                              " declares " + std::to_string(im.camera.width) + "x" +
                              std::to_string(im.camera.height));
      }
    }
    bundle.images.push_back(std::move(im));
  }
  for (const std::string& method : FeatureMethods(layout)) {
    auto& per_image = bundle.features[method];
    for (const SceneImage& im : bundle.images) {
      const std::string kp_path = layout.Keypoints(method, im.id).string();
      const std::string desc_path = layout.Descriptors(method, im.id).string();
      FeatureSet fset;
      fset.keypoints = io::ParseKeypoints(ReadFileBytes(kp_path), kp_path);
      fset.descriptors = io::ParseDescriptors(ReadFileBytes(desc_path), desc_path);
      if (fset.descriptors.count() != static_cast<int>(fset.keypoints.size())) {
        throw FormatError(desc_path + "@offset 8",
                          std::to_string(fset.descriptors.count()) + " descriptors but " +
                              kp_path + " has " + std::to_string(fset.keypoints.size()) +
                              " keypoints");
      }
      per_image.emplace(im.id, std::move(fset));
    }
  }
  const std::string obs_path = layout.Observations().string();
  bundle.observations = io::ParseObservations(ReadFileBytes(obs_path), obs_path);
  const fs::path pairs_path = layout.Pairs();
  if (fs::is_regular_file(pairs_path, ec)) {
    const std::string p = pairs_path.string();
    bundle.pairs = io::ParsePairs(ReadFileBytes(p), p);
  } else {
    bundle.pairs = ComputePairCovisibility(bundle.images, bundle.observations);
  }
  bundle.Validate();
  return bundle;
}

void SaveScene(const SceneBundle& scene, const std::string& root) {
  scene.Validate();
  const Layout layout{fs::path(root) / scene.name};
  std::error_code ec;
  fs::create_directories(layout.dir / "calib", ec);
  if (ec) Throw(ErrorCode::kIo, "cannot create " + (layout.dir / "calib").string());
  bool any_depth = false;
  for (const SceneImage& im : scene.images) any_depth = any_depth || im.depth.has_value();
  if (any_depth) fs::create_directories(layout.dir / "depth");
  for (const auto& [method, per_image] : scene.features) {
    fs::create_directories(layout.dir / "keypoints" / method);
    fs::create_directories(layout.dir / "descriptors" / method);
  }
  for (const SceneImage& im : scene.images) {
    WriteFileBytes(layout.Calib(im.id).string(), io::SerializeCalibration(im.camera));
    if (im.depth) WriteFileBytes(layout.Depth(im.id).string(), io::SerializeDepth(*im.depth));
  }
  for (const auto& [method, per_image] : scene.features) {
    for (const auto& [id, fset] : per_image) {
      WriteFileBytes(layout.Keypoints(method, id).string(),
                     io::SerializeKeypoints(fset.keypoints));
      WriteFileBytes(layout.Descriptors(method, id).string(),
                     io::SerializeDescriptors(fset.descriptors));
    }
  }
  WriteFileBytes(layout.Observations().string(), io::SerializeObservations(scene.observations));
  WriteFileBytes(layout.Pairs().string(), io::SerializePairs(scene.pairs));
}

}  // namespace imb
