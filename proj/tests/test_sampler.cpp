#include <doctest.h>

#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cgmodel/error.hpp"
#include "cgmodel/memory_budget.hpp"
#include "cgmodel/primes.hpp"
#include "cgmodel/sample_io.hpp"
#include "cgmodel/sampler.hpp"
#include "oracles.hpp"

using namespace cgmodel;

namespace {

std::uint64_t primes_up_to_T(std::uint64_t n) {
  const double T = std::log(double(n)) / std::log(std::log(std::log(double(n))));
  std::uint64_t r = 0;
  for (std::uint64_t p = 2; double(p) <= T; ++p) r += oracle::is_prime_trial(p);
  return r;
}

}  // namespace

TEST_CASE("truncation threshold") {
  const double triple = std::exp(std::exp(std::exp(1.0)));
  CHECK(triple == doctest::Approx(3814279.1).epsilon(1e-7));
  CHECK(threshold_T(triple) == doctest::Approx(std::exp(std::exp(1.0))).epsilon(1e-12));
  CHECK(threshold_T(triple) == doctest::Approx(15.1543).epsilon(1e-5));
  CHECK(threshold_T(1e6) == doctest::Approx(14.311).epsilon(1e-4));
  CHECK_THROWS_AS(threshold_T(15), DomainError);
  CHECK(threshold_T(16) == doctest::Approx(141.6).epsilon(1e-3));
}

TEST_CASE("breakpoint schedule counts the primes below T(n)") {
  const auto& schedule = TruncationSchedule::instance();
  CHECK(schedule.turning_point() > 300);
  CHECK(schedule.turning_point() < 400);
  for (std::uint64_t n = 16; n <= 200'000; ++n) REQUIRE(schedule.prime_count(n) == primes_up_to_T(n));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = std::max<std::uint64_t>(16, rng() >> (rng() % 60));
    REQUIRE(schedule.prime_count(n) == primes_up_to_T(n));
  }
  CHECK(schedule.prime_count(~std::uint64_t{0}) == primes_up_to_T(~std::uint64_t{0}));
}

TEST_CASE("membership probabilities") {
  const ModelParameters params;
  for (std::uint64_t n = 16; n < 5000; n += 2) REQUIRE(membership_probability(n, params) == 0.0);
  // T(101) ~ 10.86 covers {2, 3, 5, 7}, so M = 4.375.
  CHECK(threshold_T(101) == doctest::Approx(10.86).epsilon(1e-3));
  CHECK(membership_probability(101, params) == doctest::Approx(0.9480).epsilon(1e-4 / 0.948));
  CHECK(membership_probability(101, params) == doctest::Approx(4.375 / std::log(101.0)).epsilon(1e-15));

  // 10^6 + 1 = 101 * 9901 has no prime factor <= T ~ 14.3; 10^6 + 5 is a multiple of 5.
  CHECK(oracle::is_prime_trial(9901));
  CHECK(101 * 9901 == 1'000'001);
  CHECK(membership_probability(1'000'001, params) > 0.0);
  CHECK(membership_probability(1'000'005, params) == 0.0);

  CHECK(membership_probability(15, params) == 0.0);
  CHECK(membership_probability(53, params) == 1.0);  // clamped
  CHECK_THROWS_AS(membership_probability(1, params), DomainError);
  CHECK_THROWS_AS(membership_probability(101, ModelParameters{0, 15}), ValidationError);
  CHECK(membership_probability(101, ModelParameters{0, 200}) == 0.0);
}

TEST_CASE("no clamping for coprime n in [10^4, 10^7]") {
  const ModelParameters params;
  std::uint64_t clamped = 0, coprime = 0;
  for (std::uint64_t n = 10'001; n <= 10'000'000; n += 2) {
    const double p = membership_probability(n, params);
    coprime += p > 0;
    clamped += p >= 1.0;
  }
  CHECK(coprime > 1'000'000);
  CHECK(clamped == 0);
}

TEST_CASE("draws are pure functions of (seed, n)") {
  CHECK(draw_bits(1, 100) == draw_bits(1, 100));
  CHECK(draw_bits(1, 100) != draw_bits(2, 100));
  CHECK(draw_bits(1, 100) != draw_bits(1, 101));
  for (std::uint64_t n = 0; n < 1000; ++n) {
    const double u = draw_uniform(5, n);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sampling is deterministic and respects the support") {
  const ModelParameters params{7, 16};
  const auto a = sample_range(2, 1'000'000, params);
  const auto b = sample_range(2, 1'000'000, params);
  CHECK(a == b);
  const auto members = a.members();
  CHECK_FALSE(members.empty());
  const auto& schedule = TruncationSchedule::instance();
  for (const auto n : members) {
    REQUIRE(n >= 16);
    const auto r = schedule.prime_count(n);
    for (unsigned i = 0; i < r; ++i) REQUIRE(n % schedule.primes()[i] != 0);
  }
  CHECK(a.count() == members.size());
  for (const auto n : {17ULL, 101ULL, 999'983ULL}) CHECK(a.contains(n) == draw_member(n, params));
}

TEST_CASE("restricting the range gives the same bits") {
  const ModelParameters params{11, 16};
  const auto full = sample_range(2, 300'000, params);
  for (const auto& [lo, hi] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
           {2, 150'000}, {2, 64}, {2, 65}, {1000, 1000}, {12345, 299'999}, {250'001, 300'000}}) {
    const auto part = sample_range(lo, hi, params);
    for (std::uint64_t n = lo; n <= hi; ++n) REQUIRE(part.contains(n) == full.contains(n));
    CHECK(part.count() == full.count(lo, hi));
  }
}

TEST_CASE("parallel sampling matches the serial reference at any thread count") {
  const ModelParameters params{42, 16};
  const auto reference = serial::sample_range(5, 700'001, params);
  const long double expected = serial::expected_count(5, 700'001, params);
  std::optional<long double> chunked;
  for (const int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    CHECK(sample_range(5, 700'001, params) == reference);
    const long double e = expected_count(5, 700'001, params);
    if (!chunked) chunked = e;
    CHECK(e == *chunked);
    CHECK(std::fabs(static_cast<double>(e / expected - 1)) < 1e-14);
  }
  omp_set_num_threads(1);
}

TEST_CASE("member counts in [9e5, 1e6] sit within 4 sigma of the exact expectation") {
  const ModelParameters base;
  long double mean = 0, variance = 0;
  for (std::uint64_t n = 900'000; n <= 1'000'000; ++n) {
    const double p = membership_probability(n, base);
    mean += p;
    variance += p * (1 - p);
  }
  CHECK(static_cast<double>(expected_count(900'000, 1'000'000, base)) == doctest::Approx(double(mean)).epsilon(1e-12));
  const double sigma = std::sqrt(static_cast<double>(variance) / 100.0);  // of the 100-seed average
  double total = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    total += double(sample_range(900'000, 1'000'000, ModelParameters{seed, 16}).count());
  }
  CHECK(std::fabs(total / 100 - double(mean)) <= 4 * sigma);
}

TEST_CASE("expected counts") {
  const ModelParameters params;
  CHECK(expected_count(10, 9, params) == 0.0L);
  CHECK(expected_count(2, 15, params) == 0.0L);
  CHECK(expected_count(0, 15, params) == 0.0L);
  const long double a = expected_count(16, 10'000, params);
  CHECK(a > 0);
  CHECK(expected_count(16, 10'000, params) == a);
  long double direct = 0;
  for (std::uint64_t n = 16; n <= 10'000; ++n) direct += membership_probability(n, params);
  CHECK(static_cast<double>(a) == doctest::Approx(double(direct)).epsilon(1e-14));
}

TEST_CASE("sampling errors") {
  CHECK_THROWS_AS(sample_range(1, 10, ModelParameters{}), DomainError);
  CHECK_THROWS_AS(sample_range(10, 9, ModelParameters{}), DomainError);
  CHECK_THROWS_AS(sample_range(2, 10, ModelParameters{0, 3}), ValidationError);
  setenv(std::string(kMemoryBudgetEnv).c_str(), "1K", 1);
  CHECK_THROWS_AS(sample_range(2, 1'000'000, ModelParameters{}), ResourceError);
  unsetenv(std::string(kMemoryBudgetEnv).c_str());
}

TEST_CASE("sample files: layout and round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cgmodel_sample_io_test";
  fs::remove_all(dir);
  const auto sample = sample_range(2, 100'000, ModelParameters{9, 16});
  write_sample_files(sample, dir, true);

  const auto back = read_sample_files(dir);
  CHECK(back == sample);

  std::ifstream bits(dir / "members.bits", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(bits)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == (100'000 - 2 + 1 + 7) / 8);
  for (std::uint64_t n = 2; n <= 100'000; ++n) {
    const std::uint64_t i = n - 2;
    REQUIRE(((static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1U) == sample.contains(n));
  }

  std::ifstream list(dir / "members.txt");
  std::uint64_t n = 0, lines = 0;
  while (list >> n) {
    CHECK(n % 2 == 1);
    CHECK(sample.contains(n));
    ++lines;
  }
  CHECK(lines == sample.count());

  const auto manifest = sample_manifest(sample, true);
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["range"] == nlohmann::json::array({2, 100'000}));
  CHECK(manifest["n_min"] == 16);
  CHECK(manifest.contains("version"));
  fs::remove_all(dir);
}
