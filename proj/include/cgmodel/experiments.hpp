#pragma once

// Observed-vs-predicted machinery: pattern counts over a realization, main
// term predictions, Kim-Vu deviation certificates and seeded ensembles.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgmodel/polynomial.hpp"
#include "cgmodel/primes.hpp"
#include "cgmodel/sampler.hpp"
#include "cgmodel/singular_series.hpp"

namespace cgmodel {

enum class ExperimentKind { bateman_horn, goldbach, prime_density };

std::string to_string(ExperimentKind kind);
/// Accepts "bateman_horn", "bh", "goldbach", "prime_density", "primes".
ExperimentKind parse_experiment_kind(std::string_view text);

// ---------------------------------------------------------------------------
// Counting

/// Largest value any member takes on n in [1, x]; a sample must cover
/// [2, this] to count the family up to x. DomainError past 63 bits.
std::uint64_t required_sample_limit(const PolynomialFamily& family, std::uint64_t x);

/// #{1 <= n <= x : f_i(n) >= 2 and f_i(n) in the sample for every i}.
std::uint64_t count_bateman_horn(const SampledSet& sample, const PolynomialFamily& family, std::uint64_t x);

/// Ordered representation count sum_{2 <= n <= N-2} 1(n) 1(N-n).
std::uint64_t count_goldbach(const SampledSet& sample, std::uint64_t N);

/// #{p <= x prime : p in the sample}.
std::uint64_t count_prime_members(const SampledSet& sample, const PrimeTable& primes, std::uint64_t x);

namespace serial {
std::uint64_t count_bateman_horn(const SampledSet& sample, const PolynomialFamily& family, std::uint64_t x);
std::uint64_t count_goldbach(const SampledSet& sample, std::uint64_t N);
std::uint64_t count_prime_members(const SampledSet& sample, const PrimeTable& primes, std::uint64_t x);
}  // namespace serial

// ---------------------------------------------------------------------------
// Predictions

/// C_f / (prod_i deg f_i) * integral_2^x dt / (log t)^k. x >= 100.
double predict_bateman_horn(const PolynomialFamily& family, std::uint64_t x, const SingularSeriesEstimate& cf);

/// 2 C_2 * local * integral_2^{N-2} dt / (log t log(N-t)). N even, N >= 100.
double predict_goldbach(std::uint64_t N, long double c2, const GoldbachLocalFactor& local);

/// e^gamma log T(x) * sum_{sqrt x < p <= x} 1/log p. x >= 1000.
double predict_prime_members(std::uint64_t x, const PrimeTable& primes);

/// Exact expectations of the three counts under the model (finite sums of
/// membership probabilities; coinciding variables are not squared).
long double model_expectation_bateman_horn(const PolynomialFamily& family, std::uint64_t x,
                                           const ModelParameters& params);
long double model_expectation_goldbach(std::uint64_t N, const ModelParameters& params);
long double model_expectation_prime_members(std::uint64_t x, const PrimeTable& primes,
                                            const ModelParameters& params);

// ---------------------------------------------------------------------------
// Kim-Vu certificates

/// 8^k sqrt(k!) lambda^k sqrt(E' E).
double kimvu_threshold(unsigned k, double lambda, double E, double E_prime);

struct KimVuCertificate {
  unsigned k = 0;
  std::uint64_t n_vars = 0;
  double lambda = 0;
  double E = 0;
  double E_prime = 0;
  double threshold = 0;
  /// |Y_s - mean| per seed, in seed order.
  std::vector<double> observed_deviations;
  std::uint64_t violations = 0;

  friend bool operator==(const KimVuCertificate&, const KimVuCertificate&) = default;
};

inline constexpr std::size_t kMinimumCertificateSeeds = 30;

/// Builds a certificate from per-seed observations; E = max(mean, E').
/// ValidationError with fewer than 30 observations.
KimVuCertificate make_kimvu_certificate(unsigned k, std::uint64_t n_vars, double lambda, double E_prime,
                                        std::span<const std::uint64_t> observed);

// ---------------------------------------------------------------------------
// Ensembles

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::bateman_horn;
  std::string family;       // bateman_horn only
  std::uint64_t x = 0;      // bateman_horn and prime_density
  std::uint64_t N = 0;      // goldbach
  std::uint64_t n_min = kMinimumSupport;
  double constants_T = 1e6; // truncation for C_f and C_2
  std::optional<double> lambda;
  unsigned sweep_points = 8;

  /// Throws DomainError / ValidationError for unusable parameters.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct SweepRow {
  std::uint64_t x = 0;
  double observed = 0;  // ensemble mean
  double predicted = 0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct CountReport {
  ExperimentConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> observed;
  double predicted = 0;
  double ratio = 0;  // mean / predicted
  double mean = 0;
  double stddev = 0;  // sample standard deviation, 0 for one seed
  double model_expectation = 0;
  std::optional<KimVuCertificate> certificate;
  nlohmann::json details = nlohmann::json::object();
  std::vector<SweepRow> sweep;

  friend bool operator==(const CountReport&, const CountReport&) = default;
};

/// Sweep checkpoints ending at the configured x (or N, kept even).
std::vector<std::uint64_t> sweep_checkpoints(const ExperimentConfig& config);

/// Runs the certificate experiment alone (>= 30 seeds).
KimVuCertificate kimvu_certificate(const ExperimentConfig& config, std::span<const std::uint64_t> seeds);

/// Per-seed counts (OpenMP over seeds), prediction, exact model
/// expectation, sweep table and, with >= 30 seeds, a Kim-Vu certificate.
CountReport run_ensemble(const ExperimentConfig& config, std::span<const std::uint64_t> seeds);

/// base, base+1, ..., base+count-1.
std::vector<std::uint64_t> seed_range(std::uint64_t base, std::uint64_t count);

}  // namespace cgmodel
