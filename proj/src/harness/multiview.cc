#include "imb/harness/multiview.h"

#include <filesystem>

#include "imb/io/formats.h"
#include "imb/util/error.h"
#include "imb/util/text_io.h"

namespace imb {

namespace fs = std::filesystem;

void MultiviewConfig::Validate() const {
  std::vector<std::string> problems;
  if (data_root.empty()) problems.push_back("data root is empty");
  if (scenes.empty()) problems.push_back("no scenes given");
  if (recon_dir.empty()) problems.push_back("reconstruction dir is empty");
  if (min_points < 1) problems.push_back("min points must be >= 1");
  try {
    bags.Validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  if (problems.empty()) return;
  std::string message = "invalid multiview config:";
  for (const std::string& p : problems) message += "\n  " + p;
  Throw(ErrorCode::kValidation, message);
}

std::string BagFileName(int size, int index) {
  return "bag_" + std::to_string(size) + "_" + std::to_string(index) + ".txt";
}

SceneMultiviewResult ScoreSceneBags(const std::string& name, const Reconstruction& ground_truth,
                                    const std::map<int, std::vector<Bag>>& bags,
                                    const ReconstructionLookup& lookup,
                                    ErrorCombination mode) {
  SceneMultiviewResult result;
  result.name = name;
  std::map<int, std::vector<BagScore>> by_size;
  for (const auto& [size, list] : bags) {
    for (int index = 0; index < static_cast<int>(list.size()); ++index) {
      BagRecord rec;
      rec.size = size;
      rec.index = index;
      rec.images = list[index];
      const std::optional<Reconstruction> recon = lookup(size, index);
      rec.missing = !recon.has_value();
      rec.score = ScoreBag(recon.value_or(Reconstruction{}), ground_truth, rec.images, mode);
      result.num_missing += rec.missing ? 1 : 0;
      by_size[size].push_back(rec.score);
      result.bags.push_back(std::move(rec));
    }
  }
  result.aggregate = AggregateBags(by_size);
  return result;
}

MultiviewReport RunMultiview(const MultiviewConfig& config) {
  config.Validate();
  std::vector<std::string> missing;
  for (const std::string& scene : config.scenes) {
    for (const std::string& m : MissingSceneFiles(config.data_root, scene)) missing.push_back(m);
  }
  if (!missing.empty()) {
    std::string message = "missing inputs (" + std::to_string(missing.size()) + "):";
    for (const std::string& m : missing) message += "\n  " + m;
    Throw(ErrorCode::kValidation, message);
  }

  MultiviewReport report;
  report.config = config;
  std::vector<AccuracyCurve> curves;
  double ate_sum = 0.0;
  int ate_count = 0;
  for (const std::string& name : config.scenes) {
    const SceneBundle scene = LoadScene(config.data_root, name);
    const std::map<int, std::vector<Bag>> bags = SampleBags(scene, config.bags, config.min_points);
    const fs::path dir = fs::path(config.recon_dir) / name;
    auto lookup = [&](int size, int index) -> std::optional<Reconstruction> {
      const fs::path path = dir / BagFileName(size, index);
      std::error_code ec;
      if (!fs::is_regular_file(path, ec)) return std::nullopt;
      return io::ParseReconstruction(ReadFileBytes(path.string()), path.string());
    };
    SceneMultiviewResult result =
        ScoreSceneBags(name, GroundTruthPoses(scene), bags, lookup, config.error_mode);
    curves.push_back(result.aggregate.overall);
    if (result.aggregate.ate) {
      ate_sum += *result.aggregate.ate;
      ++ate_count;
    }
    report.scenes.push_back(std::move(result));
  }
  report.overall = MeanCurve(curves);
  if (ate_count > 0) report.ate = ate_sum / ate_count;
  return report;
}

}  // namespace imb
