#include "cgmodel/report.hpp"

#include <charconv>
#include <set>

#include "cgmodel/error.hpp"
#include "cgmodel/version.hpp"

namespace cgmodel {

namespace {

using nlohmann::json;

json params_json(const ExperimentConfig& config) {
  json p = json::object();
  switch (config.kind) {
    case ExperimentKind::bateman_horn:
      p["family"] = config.family;
      p["x"] = config.x;
      break;
    case ExperimentKind::goldbach: p["N"] = config.N; break;
    case ExperimentKind::prime_density: p["x"] = config.x; break;
  }
  if (config.lambda) p["lambda"] = *config.lambda;
  p["sweep_points"] = config.sweep_points;
  return p;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw ValidationError(std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json run_manifest(const ExperimentConfig& config, std::span<const std::uint64_t> seeds) {
  json m;
  m["format"] = kReportFormat;
  m["versions"] = {{"cgmodel", std::string(kLibraryVersion)}, {"report_format", kReportFormatVersion}};
  m["command"] = "experiment";
  m["kind"] = to_string(config.kind);
  m["params"] = params_json(config);
  m["n_min"] = config.n_min;
  m["T_truncation"] = config.constants_T;
  m["seeds"] = std::vector<std::uint64_t>(seeds.begin(), seeds.end());
  return m;
}

ManifestRun config_from_manifest(const json& m) {
  if (!m.is_object()) throw ValidationError("manifest must be a JSON object");
  reject_unknown(m, {"format", "versions", "command", "kind", "params", "n_min", "T_truncation", "seeds"}, "manifest");
  if (m.value("format", "") != kReportFormat) throw ValidationError("manifest format is not " + std::string(kReportFormat));
  const auto& versions = m.at("versions");
  if (versions.at("report_format").get<int>() != kReportFormatVersion) {
    throw ValidationError("manifest report_format " + versions.at("report_format").dump() + " is not supported");
  }
  if (m.value("command", "") != "experiment") throw ValidationError("manifest command must be 'experiment'");

  ManifestRun run;
  ExperimentConfig& c = run.config;
  c.kind = parse_experiment_kind(m.at("kind").get<std::string>());
  const json& p = m.at("params");
  reject_unknown(p, {"family", "x", "N", "lambda", "sweep_points"}, "manifest params");
  switch (c.kind) {
    case ExperimentKind::bateman_horn:
      c.family = p.at("family").get<std::string>();
      c.x = p.at("x").get<std::uint64_t>();
      break;
    case ExperimentKind::goldbach: c.N = p.at("N").get<std::uint64_t>(); break;
    case ExperimentKind::prime_density: c.x = p.at("x").get<std::uint64_t>(); break;
  }
  if (p.contains("lambda")) c.lambda = p.at("lambda").get<double>();
  c.sweep_points = p.value("sweep_points", 8U);
  c.n_min = m.at("n_min").get<std::uint64_t>();
  c.constants_T = m.at("T_truncation").get<double>();
  run.seeds = m.at("seeds").get<std::vector<std::uint64_t>>();
  c.validate();
  return run;
}

json to_json(const KimVuCertificate& cert) {
  return {{"k", cert.k},
          {"n_vars", cert.n_vars},
          {"lambda", cert.lambda},
          {"E", cert.E},
          {"E_prime", cert.E_prime},
          {"threshold", cert.threshold},
          {"violations", cert.violations},
          {"observed_deviations", cert.observed_deviations}};
}

KimVuCertificate certificate_from_json(const json& j) {
  KimVuCertificate c;
  c.k = j.at("k").get<unsigned>();
  c.n_vars = j.at("n_vars").get<std::uint64_t>();
  c.lambda = j.at("lambda").get<double>();
  c.E = j.at("E").get<double>();
  c.E_prime = j.at("E_prime").get<double>();
  c.threshold = j.at("threshold").get<double>();
  c.violations = j.at("violations").get<std::uint64_t>();
  c.observed_deviations = j.at("observed_deviations").get<std::vector<double>>();
  return c;
}

json to_json(const CountReport& r) {
  json j;
  j["kind"] = to_string(r.config.kind);
  j["params"] = params_json(r.config);
  j["seeds"] = r.seeds;
  j["observed"] = r.observed;
  j["predicted"] = r.predicted;
  j["ratio"] = r.ratio;
  j["mean"] = r.mean;
  j["stddev"] = r.stddev;
  j["model_expectation"] = r.model_expectation;
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  j["details"] = r.details;
  json sweep = json::array();
  for (const auto& row : r.sweep) sweep.push_back({{"x", row.x}, {"observed", row.observed}, {"predicted", row.predicted}});
  j["sweep"] = sweep;
  j["manifest"] = run_manifest(r.config, r.seeds);
  return j;
}

CountReport report_from_json(const json& j) {
  CountReport r;
  const ManifestRun run = config_from_manifest(j.at("manifest"));
  r.config = run.config;
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (r.seeds != run.seeds) throw ValidationError("report seeds disagree with its manifest");
  r.observed = j.at("observed").get<std::vector<std::uint64_t>>();
  r.predicted = j.at("predicted").get<double>();
  r.ratio = j.at("ratio").get<double>();
  r.mean = j.at("mean").get<double>();
  r.stddev = j.at("stddev").get<double>();
  r.model_expectation = j.at("model_expectation").get<double>();
  if (j.contains("certificate")) r.certificate = certificate_from_json(j.at("certificate"));
  r.details = j.at("details");
  for (const auto& row : j.at("sweep")) {
    r.sweep.push_back({row.at("x").get<std::uint64_t>(), row.at("observed").get<double>(),
                       row.at("predicted").get<double>()});
  }
  return r;
}

std::string sweep_csv(const CountReport& report) {
  std::string out = "x,observed,predicted,ratio\n";
  for (const auto& row : report.sweep) {
    const double ratio = row.predicted > 0 ? row.observed / row.predicted : 0.0;
    out += std::to_string(row.x) + ',' + format_double(row.observed) + ',' + format_double(row.predicted) + ',' +
           format_double(ratio) + '\n';
  }
  return out;
}

}  // namespace cgmodel
