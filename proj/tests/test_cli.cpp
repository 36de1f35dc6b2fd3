#include <doctest.h>

#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cgmodel/error.hpp"
#include "cgmodel/memory_budget.hpp"
#include "cgmodel/singular_series.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace cgmodel;
using cli::run_cli;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("CGMODEL_CLI_SCRATCH");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "cgmodel_cli_test";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

struct Run {
  int code;
  std::string out, err;
};

Run cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("count and real notation") {
  CHECK(cli::parse_count("1000") == 1000);
  CHECK(cli::parse_count("1e6") == 1'000'000);
  CHECK(cli::parse_count("2^20") == 1'048'576);
  CHECK(cli::parse_count("1.5e3") == 1500);
  for (const char* bad : {"", "-5", "1.5", "2^", "x", "1e30", "2^64", "12abc"}) {
    INFO(std::string(bad));
    CHECK_THROWS_AS(cli::parse_count(bad), ValidationError);
  }
  CHECK(cli::parse_real("2.5") == 2.5);
  CHECK(cli::parse_real("1e6") == 1e6);
  CHECK(cli::parse_real("10^3") == 1000.0);
  CHECK_THROWS_AS(cli::parse_real("0"), ValidationError);
  CHECK_THROWS_AS(cli::parse_real("nan"), ValidationError);
}

TEST_CASE("range and seed lists") {
  CHECK(cli::parse_range("2:1e6") == std::pair<std::uint64_t, std::uint64_t>{2, 1'000'000});
  CHECK_THROWS_AS(cli::parse_range("5"), ValidationError);
  CHECK_THROWS_AS(cli::parse_range("10:5"), ValidationError);
  CHECK(cli::parse_seed_list("3,1,4") == std::vector<std::uint64_t>{3, 1, 4});
  CHECK_THROWS_AS(cli::parse_seed_list("3,,4"), ValidationError);
  CHECK_THROWS_AS(cli::parse_seed_list(""), ValidationError);
}

TEST_CASE("config text") {
  const auto entries = cli::parse_config_text("# ensemble\nx = 1e5\n\n--family = \"x, x+2\"  \nseeds=3\n");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == std::pair<std::string, std::string>{"x", "1e5"});
  CHECK(entries[1] == std::pair<std::string, std::string>{"family", "x, x+2"});
  CHECK(entries[2] == std::pair<std::string, std::string>{"seeds", "3"});
  CHECK_THROWS_AS(cli::parse_config_text("just words\n"), ValidationError);
  CHECK_THROWS_AS(cli::parse_config_text("= 4\n"), ValidationError);
}

TEST_CASE("constants") {
  const auto c2 = cli_run({"constants", "--c2", "--T", "1e4"});
  CHECK(c2.code == 0);
  CHECK(c2.out.rfind("C2 T=10000 value=0.66016", 0) == 0);

  const auto cf = cli_run({"constants", "--family", "x, x+2", "--T", "1e4"});
  CHECK(cf.code == 0);
  CHECK(cf.out.find("value=1.3203") != std::string::npos);
  CHECK(cf.out.find("(heuristic)") != std::string::npos);

  const auto json = cli_run({"constants", "--c2", "--family", "x, x+2", "--T", "1e5", "--json"});
  REQUIRE(json.code == 0);
  const auto j = nlohmann::json::parse(json.out);
  const double c2_value = j["C2"]["value"];
  const double cf_value = j["C_f"]["value"];
  CHECK(std::fabs(cf_value / (2 * c2_value) - 1) <= 1e-12);
  CHECK(c2_value == doctest::Approx(static_cast<double>(compute_C2(1e5))).epsilon(1e-15));

  const auto lemma = cli_run({"constants", "--lemma2", "--k", "1", "--T", "1e5"});
  CHECK(lemma.code == 0);
  CHECK(lemma.out.find("mertens_residual=") != std::string::npos);

  CHECK(cli_run({"constants", "--family", "x, x+1"}).code == cli::kValidation);
  CHECK(cli_run({"constants"}).code == cli::kUsage);
}

TEST_CASE("sample output is byte-identical across runs and thread counts") {
  const auto a = scratch("sample_a"), b = scratch("sample_b");
  omp_set_num_threads(1);
  const auto first = cli_run({"sample", "--range", "2:2e5", "--seed", "17", "--out", a.string(), "--list"});
  REQUIRE(first.code == 0);
  CHECK(first.out.find("seed=17") != std::string::npos);
  omp_set_num_threads(4);
  REQUIRE(cli_run({"sample", "--range", "2:2e5", "--seed", "17", "--out", b.string(), "--list"}).code == 0);
  omp_set_num_threads(1);
  for (const char* file : {"members.bits", "members.txt", "manifest.json"}) CHECK(slurp(a / file) == slurp(b / file));

  std::istringstream list(slurp(a / "members.txt"));
  std::uint64_t n = 0;
  while (list >> n) REQUIRE(n % 2 == 1);
}

TEST_CASE("a shorter range is a prefix of the longer one") {
  const auto longer = scratch("prefix_long"), shorter = scratch("prefix_short");
  REQUIRE(cli_run({"sample", "--range", "2:100000", "--seed", "5", "--out", longer.string(), "--list"}).code == 0);
  REQUIRE(cli_run({"sample", "--range", "2:40000", "--seed", "5", "--out", shorter.string(), "--list"}).code == 0);
  const std::string full = slurp(longer / "members.txt"), part = slurp(shorter / "members.txt");
  CHECK(full.compare(0, part.size(), part) == 0);
  const std::string bits_full = slurp(longer / "members.bits"), bits_part = slurp(shorter / "members.bits");
  CHECK(bits_full.compare(0, bits_part.size() - 1, bits_part, 0, bits_part.size() - 1) == 0);
}

TEST_CASE("exit codes") {
  CHECK(cli_run({}).code == cli::kUsage);
  CHECK(cli_run({"frobnicate"}).code == cli::kUsage);
  CHECK(cli_run({"sample", "--range", "2:100"}).code == cli::kUsage);
  CHECK(cli_run({"experiment", "twins", "--x", "1e4"}).code == cli::kUsage);
  CHECK(cli_run({"sample", "--range", "2:abc", "--out", scratch("bad").string()}).code == cli::kValidation);
  CHECK(cli_run({"experiment", "goldbach", "--N", "1001"}).code == cli::kValidation);
  CHECK(cli_run({"experiment", "bh", "--family", "x, x+1", "--x", "1e4"}).code == cli::kValidation);
  CHECK(cli_run({"experiment", "bh", "--family", "x", "--x", "1e4", "--n-min", "3"}).code == cli::kValidation);
  CHECK(cli_run({"--help"}).code == cli::kSuccess);
}

TEST_CASE("memory budget overruns exit with the resource code") {
  setenv(std::string(kMemoryBudgetEnv).c_str(), "1K", 1);
  const auto r = cli_run({"sample", "--range", "2:1e7", "--out", scratch("budget").string()});
  unsetenv(std::string(kMemoryBudgetEnv).c_str());
  CHECK(r.code == cli::kResource);
  CHECK(r.err.find("budget") != std::string::npos);
}

TEST_CASE("config files feed options and lose to the command line") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "run.cfg") << "# twin ensemble\nfamily = \"x, x+2\"\nx = 20000\nseeds = 2\n";
    std::ofstream(dir / "typo.cfg") << "familly = x\n";
  }
  const auto from_file = cli_run({"experiment", "bh", "--config", (dir / "run.cfg").string()});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("x=20000 seeds=2") != std::string::npos);
  const auto overridden = cli_run({"experiment", "bh", "--config", (dir / "run.cfg").string(), "--x", "30000"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("x=30000 seeds=2") != std::string::npos);
  CHECK(cli_run({"experiment", "bh", "--config", (dir / "typo.cfg").string()}).code == cli::kValidation);
  CHECK(cli_run({"experiment", "bh", "--config", (dir / "missing.cfg").string()}).code == cli::kValidation);
}

TEST_CASE("experiment outputs and manifest reruns are byte-identical") {
  const auto first = scratch("exp_first"), again = scratch("exp_rerun"), from_report = scratch("exp_from_report");
  const auto r = cli_run({"experiment", "goldbach", "--N", "2^15", "--seeds", "30", "--sweep", "4", "--out", first.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("kimvu") != std::string::npos);
  const auto csv = slurp(first / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  omp_set_num_threads(3);
  REQUIRE(cli_run({"rerun", "--manifest", (first / "manifest.json").string(), "--out", again.string()}).code == 0);
  omp_set_num_threads(1);
  REQUIRE(cli_run({"rerun", "--manifest", (first / "report.json").string(), "--out", from_report.string()}).code == 0);
  for (const char* file : {"manifest.json", "report.json", "sweep.csv"}) {
    CHECK(slurp(first / file) == slurp(again / file));
    CHECK(slurp(first / file) == slurp(from_report / file));
  }

  const auto json_only = scratch("exp_json");
  REQUIRE(cli_run({"experiment", "primes", "--x", "1e4", "--format", "json", "--out", json_only.string()}).code == 0);
  CHECK(fs::exists(json_only / "report.json"));
  CHECK_FALSE(fs::exists(json_only / "sweep.csv"));
}

TEST_CASE("sample manifests rerun to identical bits") {
  const auto a = scratch("sample_manifest"), b = scratch("sample_manifest_rerun");
  REQUIRE(cli_run({"sample", "--range", "100:5e4", "--seed", "2", "--out", a.string()}).code == 0);
  REQUIRE(cli_run({"rerun", "--manifest", (a / "manifest.json").string(), "--out", b.string()}).code == 0);
  CHECK(slurp(a / "members.bits") == slurp(b / "members.bits"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));

  const auto dir = scratch("bad_manifest");
  fs::create_directories(dir);
  std::ofstream(dir / "m.json") << R"({"format": "something-else"})";
  CHECK(cli_run({"rerun", "--manifest", (dir / "m.json").string(), "--out", (dir / "out").string()}).code ==
        cli::kValidation);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(cli_run({"rerun", "--manifest", (dir / "broken.json").string(), "--out", (dir / "out").string()}).code ==
        cli::kValidation);
}
