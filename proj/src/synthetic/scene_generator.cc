#include "imb/synthetic/scene_generator.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "imb/util/error.h"

namespace imb {
namespace {

Vec3 RandomUnit(Random& rng) {
  while (true) {
    const Vec3 v(rng.Normal(), rng.Normal(), rng.Normal());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Vec3 GaussianVec3(Random& rng, double sigma) {
  return sigma * Vec3(rng.Normal(), rng.Normal(), rng.Normal());
}

std::vector<float> RandomUnitDescriptor(Random& rng, int dim) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  while (norm2 < 1e-24) {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.Normal();
      norm2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(dim);
  for (int k = 0; k < dim; ++k) out[k] = static_cast<float>(v[k] * inv);
  return out;
}

std::vector<float> PerturbDescriptor(const std::vector<float>& base, double noise,
                                     Random& rng) {
  const int dim = static_cast<int>(base.size());
  const double sigma = noise / std::sqrt(static_cast<double>(dim));
  std::vector<double> v(dim);
  double norm2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    v[k] = base[k] + sigma * rng.Normal();
    norm2 += v[k] * v[k];
  }
  if (norm2 < 1e-24) return base;
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(dim);
  for (int k = 0; k < dim; ++k) out[k] = static_cast<float>(v[k] * inv);
  return out;
}

template <typename T>
void Shuffle(std::vector<T>* v, Random& rng) {
  for (size_t k = v->size(); k > 1; --k) {
    std::swap((*v)[k - 1], (*v)[rng.UniformInt(k)]);
  }
}

Mat3 Intrinsics(double f, int w, int h) {
  Mat3 K = Mat3::Identity();
  K(0, 0) = f;
  K(1, 1) = f;
  K(0, 2) = 0.5 * (w - 1);
  K(1, 2) = 0.5 * (h - 1);
  return K;
}

CameraModel MakeCamera(const Mat3& K, int w, int h, const Vec3& center, const Vec3& target,
                       const Vec3& up) {
  CameraModel cam;
  cam.intrinsics = K;
  cam.width = w;
  cam.height = h;
  cam.rotation = LookAt(center, target, up);
  cam.translation = -cam.rotation * center;
  return cam;
}

std::optional<Vec2> ProjectVisible(const CameraModel& cam, const Vec3& X) {
  const Vec3 c = cam.ToCamera(X);
  if (!(c.z() > 1e-6)) return std::nullopt;
  const Vec2 px = cam.ProjectCameraPoint(c);
  if (!cam.InImage(px)) return std::nullopt;
  return px;
}

DepthMap RenderDepth(const SynthSpec& spec, const CameraModel& cam,
                     const std::vector<Vec3>& points, int num_plane_points) {
  DepthMap depth;
  depth.width = cam.width;
  depth.height = cam.height;
  depth.values.assign(size_t(cam.width) * cam.height, 0.0f);
  const Mat3 Kinv = cam.intrinsics.inverse();
  const Mat3 Rt = cam.rotation.transpose();
  const Vec3 C = cam.Center();
  const double r2 = spec.plane_radius * spec.plane_radius;
  if (C.z() > 0.0) {
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        const Vec3 ray = Rt * (Kinv * Vec3(x, y, 1.0));
        if (!(ray.z() < 0.0)) continue;
        const double s = -C.z() / ray.z();
        const Vec3 hit = C + s * ray;
        if (hit.x() * hit.x() + hit.y() * hit.y() <= r2) {
          depth.values[size_t(y) * cam.width + x] = static_cast<float>(s);
        }
      }
    }
  }
  const int r = spec.depth_splat_radius;
  for (size_t p = num_plane_points; p < points.size(); ++p) {
    const Vec3 c = cam.ToCamera(points[p]);
    if (!(c.z() > 1e-6)) continue;
    const Vec2 px = cam.ProjectCameraPoint(c);
    const long cx = std::lround(px.x());
    const long cy = std::lround(px.y());
    for (long dy = -r; dy <= r; ++dy) {
      for (long dx = -r; dx <= r; ++dx) {
        const long x = cx + dx;
        const long y = cy + dy;
        if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) continue;
        float& d = depth.values[size_t(y) * cam.width + x];
        const float z = static_cast<float>(c.z());
        if (d <= 0.0f || z < d) d = z;
      }
    }
  }
  return depth;
}

std::string ImageId(int k, int n) {
  const size_t digits = std::max<size_t>(4, std::to_string(n - 1).size());
  std::string num = std::to_string(k);
  return "img_" + std::string(digits - std::min(digits, num.size()), '0') + num;
}

}  // namespace

Mat3 AxisAngle(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

Mat3 RandomRotation(Random& rng, double angle_rad) {
  return AxisAngle(RandomUnit(rng), angle_rad);
}

Mat3 LookAt(const Vec3& center, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - center).normalized();
  Vec3 y = -(up - up.dot(z) * z);
  if (y.norm() < 1e-9) y = z.unitOrthogonal();
  y.normalize();
  const Vec3 x = y.cross(z);
  Mat3 R;
  R.row(0) = x.transpose();
  R.row(1) = y.transpose();
  R.row(2) = z.transpose();
  return R;
}

void SynthSpec::Validate() const {
  IMB_CHECK_ARG(num_cameras >= 2, "need at least two cameras");
  IMB_CHECK_ARG(num_points >= 1, "need at least one point");
  IMB_CHECK_ARG(planar_fraction >= 0.0 && planar_fraction <= 1.0,
                "planar fraction outside [0, 1]");
  IMB_CHECK_ARG(outlier_fraction >= 0.0 && outlier_fraction < 1.0,
                "outlier fraction outside [0, 1)");
  IMB_CHECK_ARG(keypoint_noise_px >= 0.0 && descriptor_noise >= 0.0, "negative noise");
  IMB_CHECK_ARG(descriptor_dim >= 2, "descriptor dimension must be at least 2");
  IMB_CHECK_ARG(image_width >= 16 && image_height >= 16, "image too small");
  IMB_CHECK_ARG(focal_px >= 0.0, "negative focal length");
  IMB_CHECK_ARG(ring_radius > 0.0 && cloud_radius > 0.0 && plane_radius > 0.0,
                "radii must be positive");
  IMB_CHECK_ARG(camera_jitter >= 0.0, "negative jitter");
  IMB_CHECK_ARG(ring_arc_deg > 0.0 && ring_arc_deg <= 360.0, "ring arc outside (0, 360]");
  IMB_CHECK_ARG(depth_splat_radius >= 0, "negative splat radius");
}

SyntheticScene GenerateScene(const SynthSpec& spec) {
  spec.Validate();
  SyntheticScene out;
  SceneBundle& bundle = out.bundle;
  bundle.name = spec.scene_name;

  // Points: the plane points come first, then the general cloud.
  Random point_rng(HashCombine(spec.seed, HashString("points")));
  const int num_plane =
      static_cast<int>(std::lround(spec.planar_fraction * spec.num_points));
  out.points.reserve(spec.num_points);
  for (int p = 0; p < num_plane; ++p) {
    const double r = spec.plane_radius * std::sqrt(point_rng.Uniform01());
    const double a = 2.0 * M_PI * point_rng.Uniform01();
    out.points.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
  }
  const Vec3 cloud_center(0.0, 0.0, 1.05 * spec.cloud_radius);
  while (static_cast<int>(out.points.size()) < spec.num_points) {
    const Vec3 u(point_rng.Uniform(-1, 1), point_rng.Uniform(-1, 1), point_rng.Uniform(-1, 1));
    if (u.squaredNorm() <= 1.0) out.points.push_back(cloud_center + spec.cloud_radius * u);
  }
  std::vector<std::vector<float>> point_desc(spec.num_points);
  for (auto& d : point_desc) d = RandomUnitDescriptor(point_rng, spec.descriptor_dim);

  // Cameras.
  Random cam_rng(HashCombine(spec.seed, HashString("cameras")));
  const Vec3 look_target(0.0, 0.0, 0.6 * spec.cloud_radius);
  const double distance = std::hypot(spec.ring_radius, spec.ring_height - look_target.z());
  const double extent = std::max(spec.plane_radius, 1.5 * spec.cloud_radius);
  const double focal = spec.focal_px > 0.0
                           ? spec.focal_px
                           : 0.5 * std::min(spec.image_width, spec.image_height) *
                                 distance / (1.1 * extent);
  const Mat3 K = Intrinsics(focal, spec.image_width, spec.image_height);
  const double arc = spec.ring_arc_deg * M_PI / 180.0;
  for (int k = 0; k < spec.num_cameras; ++k) {
    const double theta = spec.ring_arc_deg >= 360.0
                             ? arc * k / spec.num_cameras
                             : arc * k / (spec.num_cameras - 1) - 0.5 * arc;
    const Vec3 center = Vec3(spec.ring_radius * std::cos(theta),
                             spec.ring_radius * std::sin(theta), spec.ring_height) +
                        GaussianVec3(cam_rng, spec.camera_jitter);
    const Vec3 target = look_target + GaussianVec3(cam_rng, spec.camera_jitter);
    SceneImage im;
    im.id = ImageId(k, spec.num_cameras);
    im.camera = MakeCamera(K, spec.image_width, spec.image_height, center, target,
                           Vec3::UnitZ());
    bundle.images.push_back(std::move(im));
  }

  // Features and observations, per image.
  auto& features = bundle.features[spec.method_name];
  bool any_visible = false;
  out.keypoint_point.resize(spec.num_cameras);
  out.keypoint_outlier.resize(spec.num_cameras);
  for (int k = 0; k < spec.num_cameras; ++k) {
    SceneImage& im = bundle.images[k];
    Random rng(HashCombine(HashCombine(spec.seed, HashString("image")), k));
    std::vector<std::pair<int64_t, Vec2>> visible;
    for (int p = 0; p < spec.num_points; ++p) {
      if (const auto px = ProjectVisible(im.camera, out.points[p])) {
        visible.emplace_back(p, *px);
        bundle.observations[p].push_back({im.id, px->x(), px->y()});
      }
    }
    any_visible = any_visible || !visible.empty();
    Shuffle(&visible, rng);
    const int n = static_cast<int>(visible.size());
    const int num_outliers = static_cast<int>(std::lround(spec.outlier_fraction * n));
    std::vector<uint8_t> outlier(n, 0);
    for (const int idx : rng.SampleWithoutReplacement(n, num_outliers)) outlier[idx] = 1;

    FeatureSet fset;
    std::vector<float> desc;
    desc.reserve(size_t(n) * spec.descriptor_dim);
    for (int q = 0; q < n; ++q) {
      const auto& [point, px] = visible[q];
      Keypoint kp;
      kp.x = px.x() + spec.keypoint_noise_px * rng.Normal();
      kp.y = px.y() + spec.keypoint_noise_px * rng.Normal();
      kp.scale = 1.0 + 4.0 * rng.Uniform01();
      kp.orientation = 2.0 * M_PI * rng.Uniform01();
      kp.score = rng.Uniform01();
      fset.keypoints.push_back(kp);
      const std::vector<float> d =
          outlier[q] ? RandomUnitDescriptor(rng, spec.descriptor_dim)
                     : PerturbDescriptor(point_desc[point], spec.descriptor_noise, rng);
      desc.insert(desc.end(), d.begin(), d.end());
      out.keypoint_point[k].push_back(point);
    }
    out.keypoint_outlier[k] = std::move(outlier);
    fset.descriptors = DescriptorSet::Float(n, spec.descriptor_dim, std::move(desc));
    features.emplace(im.id, std::move(fset));
    if (spec.render_depth) im.depth = RenderDepth(spec, im.camera, out.points, num_plane);
  }
  if (!any_visible) {
    Throw(ErrorCode::kInvalidArgument, "no point is visible in any camera");
  }
  bundle.pairs = ComputePairCovisibility(bundle.images, bundle.observations);
  bundle.Validate();
  return out;
}

PairGeometry TruePairGeometry(const SceneBundle& scene, int i, int j) {
  IMB_CHECK_ARG(i >= 0 && j >= 0 && i != j && i < static_cast<int>(scene.images.size()) &&
                    j < static_cast<int>(scene.images.size()),
                "invalid image pair");
  const CameraModel& ci = scene.images[i].camera;
  const CameraModel& cj = scene.images[j].camera;
  PairGeometry g;
  g.motion = RelativeMotionBetween(ci, cj);
  const std::string& a = scene.images[std::min(i, j)].id;
  const std::string& b = scene.images[std::max(i, j)].id;
  for (const io::PairEntry& p : scene.pairs) {
    if (p.image_i == a && p.image_j == b) g.covisibility = p.covisibility;
  }
  if (g.motion.translation.norm() < 1e-9) {
    g.pure_rotation = true;
    return g;
  }
  g.fundamental = FundamentalMatrix::FromMatrix(
      cj.intrinsics.inverse().transpose() * Skew(g.motion.translation) *
      g.motion.rotation * ci.intrinsics.inverse());
  g.pose = RelativePose{g.motion.rotation, g.motion.translation.normalized()};
  return g;
}

SyntheticPair SynthesizePair(const PairSynthSpec& spec, Random& rng) {
  IMB_CHECK_ARG(spec.num_inliers >= 1, "need at least one inlier");
  IMB_CHECK_ARG(spec.outlier_fraction >= 0.0 && spec.outlier_fraction < 1.0,
                "outlier fraction outside [0, 1)");
  IMB_CHECK_ARG(spec.planar_fraction >= 0.0 && spec.planar_fraction <= 1.0,
                "planar fraction outside [0, 1]");
  IMB_CHECK_ARG(spec.min_rotation_deg >= 0.0 && spec.max_rotation_deg >= spec.min_rotation_deg,
                "bad rotation range");
  IMB_CHECK_ARG(spec.scene_extent > 0.0 && spec.scene_extent < 1.0, "scene extent outside (0, 1)");
  IMB_CHECK_ARG(spec.min_focal > 0.0 && spec.max_focal >= spec.min_focal, "bad focal range");
  const int w = spec.image_width;
  const int h = spec.image_height;
  SyntheticPair pair;
  const double distance = rng.Uniform(6.0, 10.0);
  const double scene_radius = spec.scene_extent * distance;
  const Vec3 dir_i = RandomUnit(rng);
  Vec3 axis = dir_i.cross(RandomUnit(rng));
  while (axis.norm() < 1e-6) axis = dir_i.cross(RandomUnit(rng));
  const double angle =
      rng.Uniform(spec.min_rotation_deg, spec.max_rotation_deg) * M_PI / 180.0;
  const Vec3 center_i = distance * dir_i;
  const Vec3 center_j = AxisAngle(axis, angle) * center_i * rng.Uniform(0.9, 1.1);
  const Vec3 up = RandomUnit(rng);
  pair.cam_i = MakeCamera(Intrinsics(w * rng.Uniform(spec.min_focal, spec.max_focal), w, h), w, h, center_i,
                          GaussianVec3(rng, 0.05 * scene_radius), up);
  pair.cam_j = MakeCamera(Intrinsics(w * rng.Uniform(spec.min_focal, spec.max_focal), w, h), w, h, center_j,
                          GaussianVec3(rng, 0.05 * scene_radius), up + 0.2 * RandomUnit(rng));
  pair.motion = RelativeMotionBetween(pair.cam_i, pair.cam_j);

  // A plane through the scene center facing camera i within 60 degrees.
  Vec3 normal = RandomUnit(rng);
  while (std::abs(normal.dot(dir_i)) < 0.5) normal = RandomUnit(rng);
  const Vec3 e1 = normal.unitOrthogonal();
  const Vec3 e2 = normal.cross(e1);

  const int num_planar = static_cast<int>(std::lround(spec.planar_fraction * spec.num_inliers));
  const int max_tries = 1000 * spec.num_inliers;
  int tries = 0;
  auto add_point = [&](bool planar) {
    while (true) {
      if (++tries > max_tries) {
        Throw(ErrorCode::kInvalidArgument, "could not place co-visible points");
      }
      Vec3 X;
      if (planar) {
        X = scene_radius * (rng.Uniform(-1, 1) * e1 + rng.Uniform(-1, 1) * e2);
      } else {
        X = scene_radius * Vec3(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
      }
      const auto pi = ProjectVisible(pair.cam_i, X);
      const auto pj = ProjectVisible(pair.cam_j, X);
      if (!pi || !pj) continue;
      const Vec2 ni(rng.Normal(), rng.Normal());
      const Vec2 nj(rng.Normal(), rng.Normal());
      pair.correspondences.push_back({*pi + spec.noise_px * ni, *pj + spec.noise_px * nj});
      pair.is_inlier.push_back(1);
      return;
    }
  };
  for (int k = 0; k < spec.num_inliers; ++k) add_point(k < num_planar);
  const int num_outliers = static_cast<int>(std::lround(
      spec.num_inliers * spec.outlier_fraction / (1.0 - spec.outlier_fraction)));
  for (int k = 0; k < num_outliers; ++k) {
    const Vec2 xi(rng.Uniform(-0.5, w - 0.5), rng.Uniform(-0.5, h - 0.5));
    const Vec2 xj(rng.Uniform(-0.5, w - 0.5), rng.Uniform(-0.5, h - 0.5));
    pair.correspondences.push_back({xi, xj});
    pair.is_inlier.push_back(0);
  }
  std::vector<int> order(pair.correspondences.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  Shuffle(&order, rng);
  std::vector<PointPair> corr;
  std::vector<uint8_t> inl;
  for (const int k : order) {
    corr.push_back(pair.correspondences[k]);
    inl.push_back(pair.is_inlier[k]);
  }
  pair.correspondences = std::move(corr);
  pair.is_inlier = std::move(inl);
  return pair;
}

}  // namespace imb
