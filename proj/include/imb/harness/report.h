#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "imb/harness/multiview.h"
#include "imb/harness/stereo.h"
#include "imb/harness/sweep.h"

namespace imb {

inline constexpr int kReportSchemaVersion = 1;

// Infinite errors are written as null. Timings are not part of the stereo
// JSON; they go to a separate CSV so reports are reproducible byte for byte.
nlohmann::ordered_json ToJson(const AccuracyCurve& curve);
nlohmann::ordered_json ToJson(const StereoReport& report);
nlohmann::ordered_json ToJson(const MultiviewReport& report);
nlohmann::ordered_json ToJson(const SweepResult& result);

// Inverse of ToJson; throws kFormat on schema mismatch.
AccuracyCurve AccuracyCurveFromJson(const nlohmann::ordered_json& j);
StereoReport StereoReportFromJson(const nlohmann::ordered_json& j);
MultiviewReport MultiviewReportFromJson(const nlohmann::ordered_json& j);

// Two-space indented, trailing newline.
std::string DumpJson(const nlohmann::ordered_json& j);

// One row per (pair, repeat), then one row per scene and an overall row.
std::string StereoCsv(const StereoReport& report);
// Thresholds 1..10 as rows; one accuracy column per scene, then overall.
std::string StereoCurveCsv(const StereoReport& report);
std::string StereoTimingsCsv(const StereoReport& report);

// One row per bag, then one row per (scene, size), per scene and overall.
std::string MultiviewCsv(const MultiviewReport& report);
std::string MultiviewCurveCsv(const MultiviewReport& report);

std::string SweepCsv(const SweepResult& result);

struct ReportFormats {
  bool json = true;
  bool csv = true;
};

// Writes the report files into `dir` (created if needed) and returns their
// paths. Throws kIo when the directory is not writable.
std::vector<std::string> EmitStereoReport(const StereoReport& report, const std::string& dir,
                                          ReportFormats formats = {});
std::vector<std::string> EmitMultiviewReport(const MultiviewReport& report,
                                             const std::string& dir, ReportFormats formats = {});
std::vector<std::string> EmitSweepResult(const SweepResult& result, const std::string& dir,
                                         ReportFormats formats = {});

}  // namespace imb
