#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgmodel/error.hpp"
#include "cgmodel/experiments.hpp"
#include "cgmodel/report.hpp"
#include "cgmodel/sample_io.hpp"
#include "cgmodel/singular_series.hpp"
#include "cgmodel/version.hpp"

namespace cgmodel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<std::uint64_t> parse_digits(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string fmt(long double v) { return format_double(static_cast<double>(v)); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ResourceError("failed writing " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Value parsers

std::uint64_t parse_count(std::string_view text) {
  const std::string_view s = trim(text);
  const std::string shown(text);
  if (s.empty()) throw ValidationError("empty number");
  if (const auto caret = s.find('^'); caret != std::string_view::npos) {
    const auto base = parse_digits(trim(s.substr(0, caret)));
    const auto exp = parse_digits(trim(s.substr(caret + 1)));
    if (!base || !exp) throw ValidationError("malformed number '" + shown + "'");
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < *exp; ++i) {
      if (__builtin_mul_overflow(v, *base, &v)) throw ValidationError("number '" + shown + "' exceeds 64 bits");
      if (v == 0 || v == 1) break;
    }
    return v;
  }
  if (const auto v = parse_digits(s)) return *v;
  if (s.find_first_of("eE.") != std::string_view::npos && s.front() != '-') {
    const std::string buf(s);
    char* end = nullptr;
    const double d = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() + buf.size() && std::isfinite(d) && d >= 0 && d < 0x1p64 && d == std::floor(d)) {
      return static_cast<std::uint64_t>(d);
    }
  }
  throw ValidationError("expected a non-negative integer, got '" + shown + "'");
}

double parse_real(std::string_view text) {
  const std::string_view s = trim(text);
  const std::string shown(text);
  double v = 0;
  if (const auto caret = s.find('^'); caret != std::string_view::npos) {
    v = std::pow(parse_real(s.substr(0, caret)), parse_real(s.substr(caret + 1)));
  } else {
    const std::string buf(s);
    char* end = nullptr;
    v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) throw ValidationError("malformed number '" + shown + "'");
  }
  if (!std::isfinite(v) || v <= 0) throw ValidationError("expected a positive number, got '" + shown + "'");
  return v;
}

std::pair<std::uint64_t, std::uint64_t> parse_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ValidationError("range must look like lo:hi, got '" + std::string(text) + "'");
  const std::uint64_t lo = parse_count(text.substr(0, colon)), hi = parse_count(text.substr(colon + 1));
  if (lo > hi) throw ValidationError("range " + std::string(text) + " is empty");
  return {lo, hi};
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  while (true) {
    const auto comma = text.find(',');
    seeds.push_back(parse_count(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return seeds;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.remove_prefix(1);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    entries.emplace_back(std::string(key), std::string(value));
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct ConstantsArgs {
  bool c2 = false;
  std::string family;
  std::string T = "1e6";
  bool lemma2 = false;
  std::string k = "1";
  std::string reference_T;
  bool as_json = false;
};

int cmd_constants(const ConstantsArgs& a, std::ostream& out) {
  if (!a.c2 && a.family.empty() && !a.lemma2) throw UsageError("constants: give --c2, --family or --lemma2");
  const double T = parse_real(a.T);
  json j = json::object();
  std::ostringstream text;

  if (a.c2) {
    const long double c2 = compute_C2(T);
    j["C2"] = {{"T", T}, {"value", static_cast<double>(c2)}};
    text << "C2 T=" << format_double(T) << " value=" << fmt(c2) << '\n';
  }
  std::optional<PolynomialFamily> family;
  if (!a.family.empty()) {
    family = check_admissibility(PolynomialFamily::parse(a.family));
    const SingularSeriesEstimate cf = compute_Cf(*family, T);
    j["C_f"] = {{"family", cf.family},
                {"T", T},
                {"value", static_cast<double>(cf.value)},
                {"tail_error", cf.tail_error},
                {"converged_fast", cf.converged_fast},
                {"admissibility_note", family->admissibility_note()}};
    text << "C_f family={" << cf.family << "} T=" << format_double(T) << " value=" << fmt(cf.value)
         << " tail_error~" << format_double(cf.tail_error) << " (heuristic)\n";
  }
  if (a.lemma2) {
    Lemma2Residuals res;
    if (family) {
      const double ref = a.reference_T.empty() ? 10 * T : parse_real(a.reference_T);
      res = lemma2_check(*family, T, ref);
    } else {
      const std::uint64_t k = parse_count(a.k);
      if (k == 0 || k > 64) throw ValidationError("--k must lie in [1, 64]");
      res = lemma2_check(static_cast<unsigned>(k), T);
    }
    json l = {{"k", res.k}, {"T", res.truncation}, {"mertens_residual", res.mertens}};
    text << "lemma2 k=" << res.k << " T=" << format_double(res.truncation)
         << " mertens_residual=" << format_double(res.mertens);
    if (res.singular) {
      l["singular_residual"] = *res.singular;
      l["reference_T"] = *res.reference_truncation;
      text << " singular_residual=" << format_double(*res.singular)
           << " reference_T=" << format_double(*res.reference_truncation);
    }
    text << '\n';
    j["lemma2"] = l;
  }
  out << (a.as_json ? j.dump(2) + "\n" : text.str());
  return kSuccess;
}

struct SampleArgs {
  std::string range;
  std::string seed = "0";
  std::string n_min = "16";
  std::string out_dir;
  bool list = false;
};

void write_sample(const ModelParameters& params, std::uint64_t lo, std::uint64_t hi, const fs::path& dir, bool list,
                  std::ostream& out) {
  const SampledSet sample = sample_range(lo, hi, params);
  write_sample_files(sample, dir, list);
  out << "sample seed=" << params.seed << " range=[" << lo << ", " << hi << "] n_min=" << params.n_min
      << " members=" << sample.count() << '\n';
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const auto [lo, hi] = parse_range(a.range);
  const ModelParameters params{parse_count(a.seed), parse_count(a.n_min)};
  params.validate();
  write_sample(params, lo, hi, a.out_dir, a.list, out);
  return kSuccess;
}

struct ExperimentArgs {
  std::string kind;
  std::string family;
  std::string x;
  std::string N;
  std::string seeds = "1";
  std::string base_seed = "1";
  std::string seed_list;
  std::string T = "1e6";
  std::string sweep = "8";
  std::string lambda;
  std::string n_min = "16";
  std::string format = "both";
  std::string out_dir;
};

void emit_report(const CountReport& report, const std::string& format, const std::string& out_dir, std::ostream& out) {
  out << "kind=" << to_string(report.config.kind);
  if (report.config.kind == ExperimentKind::bateman_horn) out << " family={" << report.details.value("family", "") << "}";
  if (report.config.kind == ExperimentKind::goldbach) {
    out << " N=" << report.config.N;
  } else {
    out << " x=" << report.config.x;
  }
  out << " seeds=" << report.seeds.size() << '\n';
  out << "mean=" << format_double(report.mean) << " stddev=" << format_double(report.stddev)
      << " predicted=" << format_double(report.predicted) << " ratio=" << format_double(report.ratio)
      << " model_expectation=" << format_double(report.model_expectation) << '\n';
  if (report.certificate) {
    const auto& c = *report.certificate;
    out << "kimvu k=" << c.k << " lambda=" << format_double(c.lambda) << " E=" << format_double(c.E)
        << " threshold=" << format_double(c.threshold) << " violations=" << c.violations << '\n';
  }
  if (out_dir.empty()) return;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_file(dir / "manifest.json", run_manifest(report.config, report.seeds).dump(2) + "\n");
  if (format != "csv") write_file(dir / "report.json", to_json(report).dump(2) + "\n");
  if (format != "json") write_file(dir / "sweep.csv", sweep_csv(report));
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  ExperimentConfig config;
  config.kind = parse_experiment_kind(a.kind);
  switch (config.kind) {
    case ExperimentKind::bateman_horn:
      if (a.family.empty() || a.x.empty()) throw UsageError("experiment bh needs --family and --x");
      config.family = a.family;
      config.x = parse_count(a.x);
      break;
    case ExperimentKind::goldbach:
      if (a.N.empty()) throw UsageError("experiment goldbach needs --N");
      config.N = parse_count(a.N);
      break;
    case ExperimentKind::prime_density:
      if (a.x.empty()) throw UsageError("experiment primes needs --x");
      config.x = parse_count(a.x);
      break;
  }
  config.constants_T = parse_real(a.T);
  config.n_min = parse_count(a.n_min);
  const std::uint64_t sweep = parse_count(a.sweep);
  if (sweep == 0 || sweep > 1000) throw ValidationError("--sweep must lie in [1, 1000]");
  config.sweep_points = static_cast<unsigned>(sweep);
  if (!a.lambda.empty()) config.lambda = parse_real(a.lambda);
  if (a.format != "both" && a.format != "json" && a.format != "csv") {
    throw ValidationError("--format must be json, csv or both");
  }
  config.validate();
  const std::vector<std::uint64_t> seeds =
      a.seed_list.empty() ? seed_range(parse_count(a.base_seed), parse_count(a.seeds)) : parse_seed_list(a.seed_list);
  emit_report(run_ensemble(config, seeds), a.format, a.out_dir, out);
  return kSuccess;
}

int cmd_rerun(const std::string& manifest_path, const std::string& out_dir, std::ostream& out) {
  json j = read_json_file(manifest_path);
  if (j.is_object() && j.contains("manifest")) j = j.at("manifest");
  const std::string format = j.is_object() ? j.value("format", "") : "";
  if (format == kSampleManifestFormat) {
    const ModelParameters params{j.at("seed").get<std::uint64_t>(), j.at("n_min").get<std::uint64_t>()};
    params.validate();
    write_sample(params, j.at("range").at(0).get<std::uint64_t>(), j.at("range").at(1).get<std::uint64_t>(), out_dir,
                 j.contains("member_list"), out);
    return kSuccess;
  }
  if (format == kReportFormat) {
    const ManifestRun run = config_from_manifest(j);
    emit_report(run_ensemble(run.config, run.seeds), "both", out_dir, out);
    return kSuccess;
  }
  throw ValidationError(manifest_path + " is neither a sample nor a report manifest");
}

// Splices key = value entries from every --config file into the argument
// list right after the subcommand, so explicit flags still win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  if (args.empty()) return args;
  std::vector<std::string> files;
  std::vector<std::string> rest{args.front()};
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      files.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      files.push_back(args[i].substr(9));
    } else {
      rest.push_back(args[i]);
    }
  }
  if (files.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    throw UsageError("--config must follow a subcommand");
  }
  std::vector<std::string> spliced;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot read config file " + file);
    std::stringstream buf;
    buf << in.rdbuf();
    for (const auto& [key, value] : parse_config_text(buf.str())) {
      const CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
      if (opt == nullptr) throw ValidationError("unknown config key '" + key + "' for " + args.front());
      if (opt->get_type_size() == 0) {
        if (value == "true" || value == "1" || value.empty()) {
          spliced.push_back("--" + key);
        } else if (value != "false" && value != "0") {
          throw ValidationError("config key '" + key + "' is a flag; use true or false");
        }
      } else {
        spliced.push_back("--" + key);
        spliced.push_back(value);
      }
    }
  }
  std::vector<std::string> result{rest.front()};
  std::size_t i = 1;
  // Keep the experiment kind positional ahead of the spliced options.
  if (rest.front() == "experiment" && rest.size() > 1 && rest[1].rfind("-", 0) != 0) result.push_back(rest[i++]);
  result.insert(result.end(), spliced.begin(), spliced.end());
  result.insert(result.end(), rest.begin() + static_cast<std::ptrdiff_t>(i), rest.end());
  return result;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cramer-Granville model laboratory", "cgmodel"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(kLibraryVersion));
  std::string config_unused;

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Truncated Euler products: C2, C_f and Mertens residuals");
  constants->add_flag("--c2", ca.c2, "Twin-prime constant C2(T)");
  constants->add_option("--family", ca.family, "Comma-separated polynomials, e.g. \"x, x+2\"");
  constants->add_option("--T", ca.T, "Truncation point (default 1e6)");
  constants->add_flag("--lemma2", ca.lemma2, "Scaled Mertens-product residuals at T");
  constants->add_option("--k", ca.k, "k for --lemma2 without a family");
  constants->add_option("--reference-T", ca.reference_T, "Truncation for the reference C_f (default 10 T)");
  constants->add_flag("--json", ca.as_json, "Print JSON instead of text");
  constants->add_option("--config", config_unused, "key = value file with the same options");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw one realization over a range and write it out");
  sample->add_option("--range", sa.range, "lo:hi, inclusive")->required();
  sample->add_option("--seed", sa.seed, "Seed (default 0)");
  sample->add_option("--n-min", sa.n_min, "Support cutoff, >= 16");
  sample->add_option("--out", sa.out_dir, "Output directory")->required();
  sample->add_flag("--list", sa.list, "Also write members.txt");
  sample->add_option("--config", config_unused, "key = value file with the same options");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Seeded ensemble: observed counts against predictions");
  experiment->add_option("kind", ea.kind, "bh | goldbach | primes")->required()->check(CLI::IsMember({"bh", "bateman_horn", "goldbach", "primes", "prime_density"}));
  experiment->add_option("--family", ea.family, "Family for bh");
  experiment->add_option("--x", ea.x, "Count up to x (bh, primes)");
  experiment->add_option("--N", ea.N, "Even target for goldbach");
  experiment->add_option("--seeds", ea.seeds, "Ensemble size (default 1)");
  experiment->add_option("--base-seed", ea.base_seed, "First seed (default 1)");
  experiment->add_option("--seed-list", ea.seed_list, "Explicit comma-separated seeds");
  experiment->add_option("--T", ea.T, "Truncation for C_f and C2 (default 1e6)");
  experiment->add_option("--sweep", ea.sweep, "Sweep checkpoints (default 8)");
  experiment->add_option("--lambda", ea.lambda, "Kim-Vu lambda override");
  experiment->add_option("--n-min", ea.n_min, "Support cutoff, >= 16");
  experiment->add_option("--format", ea.format, "json | csv | both (default both)");
  experiment->add_option("--out", ea.out_dir, "Output directory");
  experiment->add_option("--config", config_unused, "key = value file with the same options");

  std::string manifest_path, rerun_out;
  auto* rerun = app.add_subcommand("rerun", "Reproduce a run from its manifest");
  rerun->add_option("--manifest", manifest_path, "manifest.json or report.json")->required();
  rerun->add_option("--out", rerun_out, "Output directory")->required();

  try {
    std::vector<std::string> argv = expand_config(args, app);
    std::reverse(argv.begin(), argv.end());
    try {
      app.parse(argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kSuccess : kUsage;
    }
    if (constants->parsed()) return cmd_constants(ca, out);
    if (sample->parsed()) return cmd_sample(sa, out);
    if (experiment->parsed()) return cmd_experiment(ea, out);
    if (rerun->parsed()) return cmd_rerun(manifest_path, rerun_out, out);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kResource;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace cgmodel::cli
