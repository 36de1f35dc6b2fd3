#pragma once

// JSON and CSV forms of experiment reports, and the run manifest that
// reproduces them.

#include <string>
#include <vector>

#include <json.hpp>

#include "cgmodel/experiments.hpp"

namespace cgmodel {

inline constexpr const char* kReportFormat = "cgmodel-report";

/// Everything needed to regenerate a report: config, seeds and versions.
nlohmann::json run_manifest(const ExperimentConfig& config, std::span<const std::uint64_t> seeds);

/// Inverse of run_manifest. ValidationError on unknown keys, a foreign
/// format tag or a report-format version mismatch.
struct ManifestRun {
  ExperimentConfig config;
  std::vector<std::uint64_t> seeds;
};
ManifestRun config_from_manifest(const nlohmann::json& manifest);

nlohmann::json to_json(const CountReport& report);
CountReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KimVuCertificate& cert);
KimVuCertificate certificate_from_json(const nlohmann::json& j);

/// "x,observed,predicted,ratio" rows, one per sweep checkpoint.
std::string sweep_csv(const CountReport& report);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace cgmodel
