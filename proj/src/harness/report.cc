#include "imb/harness/report.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>

#include "imb/util/error.h"
#include "imb/util/random.h"
#include "imb/util/text_io.h"

namespace imb {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kDescriptorFormatVersion = 1;

ordered_json Number(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

ordered_json Optional(const std::optional<double>& x) {
  return x ? Number(*x) : ordered_json(nullptr);
}

double NumberOrInf(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::optional<double> OptionalNumber(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

// Shortest representation that parses back to the same double.
std::string Num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string OptNum(const std::optional<double>& x) { return x ? Num(*x) : ""; }

// Fields here are ids and fixed keywords; quote only if needed.
std::string Field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename Fn>
auto Guard(const char* what, Fn fn) {
  try {
    return fn();
  } catch (const ordered_json::exception& e) {
    Throw(ErrorCode::kFormat, std::string(what) + ": " + e.what());
  }
}

void CheckHeader(const ordered_json& j, const std::string& kind) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
    Throw(ErrorCode::kFormat, "unsupported report schema version");
  }
  if (j.at("kind").get<std::string>() != kind) {
    Throw(ErrorCode::kFormat, "expected a " + kind + " report");
  }
}

ordered_json PoseErrorJson(const PairPoseError& e) {
  ordered_json j;
  j["rotation_deg"] = Number(e.rotation_deg);
  j["translation_deg"] = Number(e.translation_deg);
  j["combined_deg"] = Number(e.combined_deg);
  return j;
}

PairPoseError PoseErrorFromJson(const ordered_json& j) {
  return {NumberOrInf(j.at("rotation_deg")), NumberOrInf(j.at("translation_deg")),
          NumberOrInf(j.at("combined_deg"))};
}

ordered_json BagSpecJson(const BagSpec& b) {
  ordered_json j;
  j["sizes"] = b.sizes;
  j["counts"] = b.counts;
  j["seed"] = b.seed;
  return j;
}

std::string WriteInto(const fs::path& dir, const std::string& name, const std::string& bytes) {
  const std::string path = (dir / name).string();
  WriteFileBytes(path, bytes);
  return path;
}

fs::path PrepareDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    Throw(ErrorCode::kIo, "cannot create output directory " + dir);
  }
  return fs::path(dir);
}

std::string CurveCsv(const std::vector<std::string>& names,
                     const std::vector<const AccuracyCurve*>& curves) {
  std::string out = "threshold_deg";
  for (const std::string& n : names) out += "," + Field(n);
  out += "\n";
  for (int k = 0; k < kNumAccuracyThresholds; ++k) {
    out += Num(AccuracyCurve::Threshold(k));
    for (const AccuracyCurve* c : curves) out += "," + (c ? Num(c->accuracy[k]) : "");
    out += "\n";
  }
  return out;
}

}  // namespace

std::string DumpJson(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json ToJson(const AccuracyCurve& curve) {
  ordered_json j;
  ordered_json thresholds = ordered_json::array();
  for (int k = 0; k < kNumAccuracyThresholds; ++k) thresholds.push_back(AccuracyCurve::Threshold(k));
  j["thresholds_deg"] = thresholds;
  j["accuracy"] = curve.accuracy;
  j["mAA"] = curve.mAA;
  return j;
}

AccuracyCurve AccuracyCurveFromJson(const ordered_json& j) {
  return Guard("accuracy curve", [&] {
    AccuracyCurve c;
    const ordered_json& acc = j.at("accuracy");
    if (!acc.is_array() || acc.size() != kNumAccuracyThresholds) {
      Throw(ErrorCode::kFormat, "accuracy curve must have 10 entries");
    }
    for (int k = 0; k < kNumAccuracyThresholds; ++k) c.accuracy[k] = acc[k].get<double>();
    c.mAA = j.at("mAA").get<double>();
    return c;
  });
}

ordered_json ToJson(const StereoReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "stereo";
  ordered_json meta;
  meta["prng"] = std::string(kPrngName);
  meta["descriptor_format_version"] = kDescriptorFormatVersion;
  meta["pair_seed_rule"] = "hash(seed, scene, image_i, image_j, repeat)";
  meta["uni_direction"] = "image_i->image_j";
  j["metadata"] = meta;
  j["config"] = ToJson(report.config);
  ordered_json scenes = ordered_json::array();
  for (const SceneStereoResult& s : report.scenes) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["num_pairs"] = s.pairs.size();
    sj["num_scored_pairs"] = s.NumScoredPairs();
    sj["mean_inlier_ratio"] = s.mean_inlier_ratio;
    sj["curve"] = s.curve ? ToJson(*s.curve) : ordered_json(nullptr);
    ordered_json reps = ordered_json::array();
    for (const AccuracyCurve& c : s.repeat_curves) reps.push_back(ToJson(c));
    sj["repeat_curves"] = reps;
    ordered_json pairs = ordered_json::array();
    for (const PairRecord& p : s.pairs) {
      ordered_json pj;
      pj["image_i"] = p.image_i;
      pj["image_j"] = p.image_j;
      pj["covisibility"] = p.covisibility;
      pj["excluded"] = p.excluded;
      pj["num_tentatives"] = p.num_tentatives;
      ordered_json attempts = ordered_json::array();
      for (const PairAttempt& a : p.attempts) {
        ordered_json aj;
        aj["seed"] = a.seed;
        aj["status"] = a.status;
        aj["num_inliers"] = a.num_inliers;
        aj["inlier_ratio"] = a.inlier_ratio;
        aj["iterations"] = a.iterations;
        aj["error"] = PoseErrorJson(a.error);
        attempts.push_back(aj);
      }
      pj["repeats"] = attempts;
      pairs.push_back(pj);
    }
    sj["pairs"] = pairs;
    scenes.push_back(sj);
  }
  j["scenes"] = scenes;
  ordered_json overall;
  overall["curve"] = ToJson(report.overall);
  overall["mean_inlier_ratio"] = report.mean_inlier_ratio;
  j["overall"] = overall;
  return j;
}

StereoReport StereoReportFromJson(const ordered_json& j) {
  return Guard("stereo report", [&] {
    CheckHeader(j, "stereo");
    StereoReport r;
    r.config = RunConfigFromJson(j.at("config"));
    for (const ordered_json& sj : j.at("scenes")) {
      SceneStereoResult s;
      s.name = sj.at("name").get<std::string>();
      s.mean_inlier_ratio = sj.at("mean_inlier_ratio").get<double>();
      if (!sj.at("curve").is_null()) s.curve = AccuracyCurveFromJson(sj.at("curve"));
      for (const ordered_json& c : sj.at("repeat_curves")) {
        s.repeat_curves.push_back(AccuracyCurveFromJson(c));
      }
      for (const ordered_json& pj : sj.at("pairs")) {
        PairRecord p;
        p.image_i = pj.at("image_i").get<std::string>();
        p.image_j = pj.at("image_j").get<std::string>();
        p.covisibility = pj.at("covisibility").get<double>();
        p.excluded = pj.at("excluded").get<bool>();
        p.num_tentatives = pj.at("num_tentatives").get<int>();
        for (const ordered_json& aj : pj.at("repeats")) {
          PairAttempt a;
          a.seed = aj.at("seed").get<uint64_t>();
          a.status = aj.at("status").get<std::string>();
          a.num_inliers = aj.at("num_inliers").get<int>();
          a.inlier_ratio = aj.at("inlier_ratio").get<double>();
          a.iterations = aj.at("iterations").get<int64_t>();
          a.error = PoseErrorFromJson(aj.at("error"));
          p.attempts.push_back(a);
        }
        s.pairs.push_back(std::move(p));
      }
      r.scenes.push_back(std::move(s));
    }
    r.overall = AccuracyCurveFromJson(j.at("overall").at("curve"));
    r.mean_inlier_ratio = j.at("overall").at("mean_inlier_ratio").get<double>();
    return r;
  });
}

std::string StereoCsv(const StereoReport& report) {
  std::string out =
      "row,scene,image_i,image_j,repeat,covisibility,status,num_tentatives,num_inliers,"
      "inlier_ratio,iterations,rotation_deg,translation_deg,combined_deg,mAA\n";
  for (const SceneStereoResult& s : report.scenes) {
    for (const PairRecord& p : s.pairs) {
      const std::string prefix = "pair," + Field(s.name) + "," + Field(p.image_i) + "," +
                                 Field(p.image_j) + ",";
      if (p.excluded) {
        out += prefix + "," + Num(p.covisibility) + ",excluded_pure_rotation," +
               std::to_string(p.num_tentatives) + ",,,,,,,\n";
        continue;
      }
      for (size_t r = 0; r < p.attempts.size(); ++r) {
        const PairAttempt& a = p.attempts[r];
        out += prefix + std::to_string(r) + "," + Num(p.covisibility) + "," + a.status + "," +
               std::to_string(p.num_tentatives) + "," + std::to_string(a.num_inliers) + "," +
               Num(a.inlier_ratio) + "," + std::to_string(a.iterations) + "," +
               Num(a.error.rotation_deg) + "," + Num(a.error.translation_deg) + "," +
               Num(a.error.combined_deg) + ",\n";
      }
    }
  }
  for (const SceneStereoResult& s : report.scenes) {
    out += "scene," + Field(s.name) + ",,,,,,,,"  + Num(s.mean_inlier_ratio) + ",,,,," +
           OptNum(s.curve ? std::optional<double>(s.curve->mAA) : std::nullopt) + "\n";
  }
  out += "overall,,,,,,,,," + Num(report.mean_inlier_ratio) + ",,,,," + Num(report.overall.mAA) +
         "\n";
  return out;
}

std::string StereoCurveCsv(const StereoReport& report) {
  std::vector<std::string> names;
  std::vector<const AccuracyCurve*> curves;
  for (const SceneStereoResult& s : report.scenes) {
    names.push_back(s.name);
    curves.push_back(s.curve ? &*s.curve : nullptr);
  }
  names.push_back("overall");
  curves.push_back(&report.overall);
  return CurveCsv(names, curves);
}

std::string StereoTimingsCsv(const StereoReport& report) {
  std::string out = "scene,image_i,image_j,repeat,matching_seconds,estimation_seconds\n";
  const StereoTimings& t = report.timings;
  for (size_t s = 0; s < report.scenes.size() && s < t.matching_seconds.size(); ++s) {
    const SceneStereoResult& scene = report.scenes[s];
    for (size_t p = 0; p < scene.pairs.size(); ++p) {
      const std::string prefix =
          Field(scene.name) + "," + Field(scene.pairs[p].image_i) + "," +
          Field(scene.pairs[p].image_j) + ",";
      const std::vector<double>& est = t.estimation_seconds[s][p];
      if (est.empty()) out += prefix + "," + Num(t.matching_seconds[s][p]) + ",\n";
      for (size_t r = 0; r < est.size(); ++r) {
        out += prefix + std::to_string(r) + "," + Num(t.matching_seconds[s][p]) + "," +
               Num(est[r]) + "\n";
      }
    }
  }
  out += "total,,,,," + Num(t.total_seconds) + "\n";
  return out;
}

ordered_json ToJson(const MultiviewReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "multiview";
  ordered_json cfg;
  cfg["data_root"] = report.config.data_root;
  cfg["scenes"] = report.config.scenes;
  cfg["recon_dir"] = report.config.recon_dir;
  cfg["bags"] = BagSpecJson(report.config.bags);
  cfg["min_points"] = report.config.min_points;
  cfg["error_mode"] = ErrorCombinationName(report.config.error_mode);
  j["config"] = cfg;
  ordered_json scenes = ordered_json::array();
  for (const SceneMultiviewResult& s : report.scenes) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["num_bags"] = s.bags.size();
    sj["num_missing"] = s.num_missing;
    ordered_json per_size = ordered_json::array();
    for (const auto& [size, curve] : s.aggregate.per_size) {
      ordered_json e;
      e["size"] = size;
      e["curve"] = ToJson(curve);
      const auto it = s.aggregate.ate_per_size.find(size);
      e["ate"] = it == s.aggregate.ate_per_size.end() ? ordered_json(nullptr) : Optional(it->second);
      per_size.push_back(e);
    }
    sj["per_size"] = per_size;
    sj["curve"] = ToJson(s.aggregate.overall);
    sj["ate"] = Optional(s.aggregate.ate);
    ordered_json bags = ordered_json::array();
    for (const BagRecord& b : s.bags) {
      ordered_json bj;
      bj["size"] = b.size;
      bj["index"] = b.index;
      bj["images"] = b.images;
      bj["missing"] = b.missing;
      bj["num_pairs"] = b.score.num_pairs;
      bj["num_excluded_pairs"] = b.score.num_excluded_pairs;
      bj["num_registered"] = b.score.num_registered;
      bj["ate"] = Optional(b.score.ate);
      bj["curve"] = ToJson(b.score.curve);
      bags.push_back(bj);
    }
    sj["bags"] = bags;
    scenes.push_back(sj);
  }
  j["scenes"] = scenes;
  ordered_json overall;
  overall["curve"] = ToJson(report.overall);
  overall["ate"] = Optional(report.ate);
  j["overall"] = overall;
  return j;
}

MultiviewReport MultiviewReportFromJson(const ordered_json& j) {
  return Guard("multiview report", [&] {
    CheckHeader(j, "multiview");
    MultiviewReport r;
    const ordered_json& cfg = j.at("config");
    r.config.data_root = cfg.at("data_root").get<std::string>();
    r.config.scenes = cfg.at("scenes").get<std::vector<std::string>>();
    r.config.recon_dir = cfg.at("recon_dir").get<std::string>();
    r.config.bags.sizes = cfg.at("bags").at("sizes").get<std::vector<int>>();
    r.config.bags.counts = cfg.at("bags").at("counts").get<std::vector<int>>();
    r.config.bags.seed = cfg.at("bags").at("seed").get<uint64_t>();
    r.config.min_points = cfg.at("min_points").get<int>();
    r.config.error_mode = ParseErrorCombination(cfg.at("error_mode").get<std::string>());
    for (const ordered_json& sj : j.at("scenes")) {
      SceneMultiviewResult s;
      s.name = sj.at("name").get<std::string>();
      s.num_missing = sj.at("num_missing").get<int>();
      for (const ordered_json& e : sj.at("per_size")) {
        const int size = e.at("size").get<int>();
        s.aggregate.per_size[size] = AccuracyCurveFromJson(e.at("curve"));
        s.aggregate.ate_per_size[size] = OptionalNumber(e.at("ate"));
      }
      s.aggregate.overall = AccuracyCurveFromJson(sj.at("curve"));
      s.aggregate.ate = OptionalNumber(sj.at("ate"));
      for (const ordered_json& bj : sj.at("bags")) {
        BagRecord b;
        b.size = bj.at("size").get<int>();
        b.index = bj.at("index").get<int>();
        b.images = bj.at("images").get<std::vector<std::string>>();
        b.missing = bj.at("missing").get<bool>();
        b.score.num_pairs = bj.at("num_pairs").get<int>();
        b.score.num_excluded_pairs = bj.at("num_excluded_pairs").get<int>();
        b.score.num_registered = bj.at("num_registered").get<int>();
        b.score.ate = OptionalNumber(bj.at("ate"));
        b.score.curve = AccuracyCurveFromJson(bj.at("curve"));
        s.bags.push_back(std::move(b));
      }
      r.scenes.push_back(std::move(s));
    }
    r.overall = AccuracyCurveFromJson(j.at("overall").at("curve"));
    r.ate = OptionalNumber(j.at("overall").at("ate"));
    return r;
  });
}

std::string MultiviewCsv(const MultiviewReport& report) {
  std::string out = "row,scene,size,index,missing,num_registered,num_pairs,ate,mAA\n";
  for (const SceneMultiviewResult& s : report.scenes) {
    for (const BagRecord& b : s.bags) {
      out += "bag," + Field(s.name) + "," + std::to_string(b.size) + "," +
             std::to_string(b.index) + "," + (b.missing ? "1" : "0") + "," +
             std::to_string(b.score.num_registered) + "," + std::to_string(b.score.num_pairs) +
             "," + OptNum(b.score.ate) + "," + Num(b.score.curve.mAA) + "\n";
    }
  }
  for (const SceneMultiviewResult& s : report.scenes) {
    for (const auto& [size, curve] : s.aggregate.per_size) {
      const auto it = s.aggregate.ate_per_size.find(size);
      out += "size," + Field(s.name) + "," + std::to_string(size) + ",,,,," +
             (it == s.aggregate.ate_per_size.end() ? "" : OptNum(it->second)) + "," +
             Num(curve.mAA) + "\n";
    }
    out += "scene," + Field(s.name) + ",,,,,," + OptNum(s.aggregate.ate) + "," +
           Num(s.aggregate.overall.mAA) + "\n";
  }
  out += "overall,,,,,,," + OptNum(report.ate) + "," + Num(report.overall.mAA) + "\n";
  return out;
}

std::string MultiviewCurveCsv(const MultiviewReport& report) {
  std::vector<std::string> names;
  std::vector<const AccuracyCurve*> curves;
  for (const SceneMultiviewResult& s : report.scenes) {
    names.push_back(s.name);
    curves.push_back(&s.aggregate.overall);
  }
  names.push_back("overall");
  curves.push_back(&report.overall);
  return CurveCsv(names, curves);
}

ordered_json ToJson(const SweepResult& result) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "sweep";
  ordered_json entries = ordered_json::array();
  for (size_t i = 0; i < result.ranked.size(); ++i) {
    const SweepEntry& e = result.ranked[i];
    ordered_json ej;
    ej["rank"] = i + 1;
    ej["key"] = e.point.Key();
    ej["mode"] = MatchingModeName(e.point.mode);
    ej["ratio"] = e.point.ratio;
    ej["threshold"] = e.point.threshold;
    ej["max_iterations"] = e.point.max_iterations;
    ej["mAA"] = e.mAA;
    ej["mean_inlier_ratio"] = e.mean_inlier_ratio;
    ej["failed"] = e.failed;
    ej["failure"] = e.failure;
    ej["mean_pair_seconds"] = e.mean_pair_seconds;
    entries.push_back(ej);
  }
  j["entries"] = entries;
  j["best"] = result.ranked.empty() ? ordered_json(nullptr) : entries.front();
  return j;
}

std::string SweepCsv(const SweepResult& result) {
  std::string out =
      "rank,mode,ratio,threshold,max_iterations,mAA,mean_inlier_ratio,failed,mean_pair_seconds\n";
  for (size_t i = 0; i < result.ranked.size(); ++i) {
    const SweepEntry& e = result.ranked[i];
    out += std::to_string(i + 1) + "," + MatchingModeName(e.point.mode) + "," +
           Num(e.point.ratio) + "," + Num(e.point.threshold) + "," +
           std::to_string(e.point.max_iterations) + "," + Num(e.mAA) + "," +
           Num(e.mean_inlier_ratio) + "," + (e.failed ? "1" : "0") + "," +
           Num(e.mean_pair_seconds) + "\n";
  }
  return out;
}

std::vector<std::string> EmitStereoReport(const StereoReport& report, const std::string& dir,
                                          ReportFormats formats) {
  const fs::path out = PrepareDir(dir);
  std::vector<std::string> paths;
  if (formats.json) paths.push_back(WriteInto(out, "stereo.json", DumpJson(ToJson(report))));
  if (formats.csv) {
    paths.push_back(WriteInto(out, "stereo_pairs.csv", StereoCsv(report)));
    paths.push_back(WriteInto(out, "stereo_curve.csv", StereoCurveCsv(report)));
    paths.push_back(WriteInto(out, "stereo_timings.csv", StereoTimingsCsv(report)));
  }
  return paths;
}

std::vector<std::string> EmitMultiviewReport(const MultiviewReport& report,
                                             const std::string& dir, ReportFormats formats) {
  const fs::path out = PrepareDir(dir);
  std::vector<std::string> paths;
  if (formats.json) paths.push_back(WriteInto(out, "multiview.json", DumpJson(ToJson(report))));
  if (formats.csv) {
    paths.push_back(WriteInto(out, "multiview_bags.csv", MultiviewCsv(report)));
    paths.push_back(WriteInto(out, "multiview_curve.csv", MultiviewCurveCsv(report)));
  }
  return paths;
}

std::vector<std::string> EmitSweepResult(const SweepResult& result, const std::string& dir,
                                         ReportFormats formats) {
  const fs::path out = PrepareDir(dir);
  std::vector<std::string> paths;
  if (formats.json) paths.push_back(WriteInto(out, "sweep.json", DumpJson(ToJson(result))));
  if (formats.csv) paths.push_back(WriteInto(out, "sweep.csv", SweepCsv(result)));
  return paths;
}

}  // namespace imb
