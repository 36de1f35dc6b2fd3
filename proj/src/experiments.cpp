#include "cgmodel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>

#include "cgmodel/error.hpp"
#include "cgmodel/memory_budget.hpp"
#include "cgmodel/quadrature.hpp"

namespace cgmodel {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::bateman_horn: return "bateman_horn";
    case ExperimentKind::goldbach: return "goldbach";
    case ExperimentKind::prime_density: return "prime_density";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  if (text == "bateman_horn" || text == "bh") return ExperimentKind::bateman_horn;
  if (text == "goldbach") return ExperimentKind::goldbach;
  if (text == "prime_density" || text == "primes") return ExperimentKind::prime_density;
  throw ValidationError("unknown experiment kind '" + std::string(text) + "'");
}

namespace {

constexpr std::uint64_t kValueCeiling = std::uint64_t{1} << 63;
constexpr std::uint64_t kSumChunk = 1 << 15;

// Evaluates a member at n; the ceiling was checked by required_sample_limit.
inline __int128 value_at(const IntPolynomial& f, std::uint64_t n) {
  return *f.evaluate_small(static_cast<std::int64_t>(n));
}

void require_bh_coverage(const SampledSet& sample, const PolynomialFamily& family, std::uint64_t x) {
  const std::uint64_t need = required_sample_limit(family, x);
  if (sample.lo() > 2 || sample.hi() < need) {
    throw ValidationError("insufficient sample range: counting {" + family.to_string() + "} up to x = " +
                          std::to_string(x) + " requires [2, " + std::to_string(need) + "], sample covers [" +
                          std::to_string(sample.lo()) + ", " + std::to_string(sample.hi()) + "]");
  }
}

void require_coverage(const SampledSet& sample, std::uint64_t hi, const char* what) {
  if (sample.lo() > 2 || sample.hi() < hi) {
    throw ValidationError(std::string("insufficient sample range for ") + what + ": requires [2, " +
                          std::to_string(hi) + "], sample covers [" + std::to_string(sample.lo()) + ", " +
                          std::to_string(sample.hi()) + "]");
  }
}

inline bool bh_hit(const SampledSet& sample, const PolynomialFamily& family, std::uint64_t n) {
  for (const auto& f : family.members()) {
    const __int128 v = value_at(f, n);
    if (v < 2 || !sample.contains(static_cast<std::uint64_t>(v))) return false;
  }
  return true;
}

// Sum of term(n) over [lo, hi] in fixed-size chunks reduced in order.
template <class Term>
long double ordered_sum(std::uint64_t lo, std::uint64_t hi, const Term& term) {
  if (lo > hi) return 0.0L;
  const std::uint64_t chunks = (hi - lo) / kSumChunk + 1;
  std::vector<long double> partial(chunks, 0.0L);
  const auto total = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < total; ++c) {
    const std::uint64_t a = lo + static_cast<std::uint64_t>(c) * kSumChunk;
    const std::uint64_t b = std::min(hi, a + (kSumChunk - 1));
    long double s = 0.0L;
    for (std::uint64_t n = a; n <= b; ++n) s += term(n);
    partial[static_cast<std::size_t>(c)] = s;
  }
  long double sum = 0.0L;
  for (const long double v : partial) sum += v;
  return sum;
}

}  // namespace

std::uint64_t required_sample_limit(const PolynomialFamily& family, std::uint64_t x) {
  if (x > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw DomainError("x exceeds the 63-bit range");
  }
  __int128 best = 2;
  for (const auto& f : family.members()) {
    const bool increasing = std::all_of(f.coefficients().begin(), f.coefficients().end(),
                                        [](const BigInt& c) { return c >= 0; });
    auto check = [&](std::uint64_t n) {
      const auto v = f.evaluate_small(static_cast<std::int64_t>(n));
      if (!v || *v >= static_cast<__int128>(kValueCeiling)) {
        throw DomainError("values of " + f.to_string() + " up to x = " + std::to_string(x) +
                          " exceed the 63-bit range");
      }
      best = std::max(best, *v);
    };
    if (x == 0) continue;
    if (increasing) {
      check(x);
    } else {
      for (std::uint64_t n = 1; n <= x; ++n) check(n);
    }
  }
  return static_cast<std::uint64_t>(best);
}

namespace serial {

std::uint64_t count_bateman_horn(const SampledSet& sample, const PolynomialFamily& family, std::uint64_t x) {
  require_bh_coverage(sample, family, x);
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= x; ++n) count += bh_hit(sample, family, n);
  return count;
}

std::uint64_t count_goldbach(const SampledSet& sample, std::uint64_t N) {
  if (N % 2 != 0) throw DomainError("Goldbach count needs even N, got " + std::to_string(N));
  if (N < 4) return 0;
  require_coverage(sample, N - 2, "Goldbach count");
  std::uint64_t count = 0;
  for (std::uint64_t n = 2; n <= N - 2; ++n) count += sample.contains(n) && sample.contains(N - n);
  return count;
}

std::uint64_t count_prime_members(const SampledSet& sample, const PrimeTable& primes, std::uint64_t x) {
  if (x < 2) return 0;
  require_coverage(sample, x, "prime-member count");
  if (primes.limit() < x) throw ValidationError("prime table does not reach x = " + std::to_string(x));
  std::uint64_t count = 0;
  for (std::uint64_t n = 2; n <= x; ++n) count += sample.contains(n) && primes.is_prime(n);
  return count;
}

}  // namespace serial

std::uint64_t count_bateman_horn(const SampledSet& sample, const PolynomialFamily& family, std::uint64_t x) {
  require_bh_coverage(sample, family, x);
  const auto last = static_cast<std::int64_t>(x);
  std::uint64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (std::int64_t n = 1; n <= last; ++n) count += bh_hit(sample, family, static_cast<std::uint64_t>(n));
  return count;
}

std::uint64_t count_goldbach(const SampledSet& sample, std::uint64_t N) {
  if (N % 2 != 0) throw DomainError("Goldbach count needs even N, got " + std::to_string(N));
  if (N < 4) return 0;
  require_coverage(sample, N - 2, "Goldbach count");
  const auto last = static_cast<std::int64_t>(N - 2);
  std::uint64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (std::int64_t n = 2; n <= last; ++n) {
    const auto m = static_cast<std::uint64_t>(n);
    count += sample.contains(m) && sample.contains(N - m);
  }
  return count;
}

std::uint64_t count_prime_members(const SampledSet& sample, const PrimeTable& primes, std::uint64_t x) {
  if (x < 2) return 0;
  require_coverage(sample, x, "prime-member count");
  if (primes.limit() < x) throw ValidationError("prime table does not reach x = " + std::to_string(x));
  const auto words = sample.words();
  const std::uint64_t lo = sample.lo();
  const auto last_word = static_cast<std::int64_t>((x - lo) / 64);
  std::uint64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (std::int64_t w = 0; w <= last_word; ++w) {
    std::uint64_t bits = words[static_cast<std::size_t>(w)];
    while (bits != 0) {
      const std::uint64_t n = lo + 64 * static_cast<std::uint64_t>(w) + static_cast<unsigned>(std::countr_zero(bits));
      bits &= bits - 1;
      if (n <= x && primes.is_prime(n)) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Predictions

double predict_bateman_horn(const PolynomialFamily& family, std::uint64_t x, const SingularSeriesEstimate& cf) {
  if (x < 100) throw DomainError("Bateman-Horn prediction needs x >= 100");
  const double integral = log_power_integral(2.0, static_cast<double>(x), family.k());
  return static_cast<double>(cf.value) / static_cast<double>(family.degree_product()) * integral;
}

double predict_goldbach(std::uint64_t N, long double c2, const GoldbachLocalFactor& local) {
  if (N % 2 != 0) throw DomainError("Goldbach prediction needs even N, got " + std::to_string(N));
  if (N < 100) throw DomainError("Goldbach prediction needs N >= 100");
  return static_cast<double>(2.0L * c2 * local.value) * goldbach_integral(static_cast<double>(N));
}

double predict_prime_members(std::uint64_t x, const PrimeTable& primes) {
  if (x < 1000) throw DomainError("prime-member prediction needs x >= 1000");
  if (primes.limit() < x) throw ValidationError("prime table does not reach x = " + std::to_string(x));
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (root * root > x) --root;
  while ((root + 1) * (root + 1) <= x) ++root;
  long double sum = 0.0L;
  primes.for_each_prime(root + 1, x, [&](std::uint64_t p) { sum += 1.0L / std::log(static_cast<long double>(p)); });
  const long double scale = std::exp(kEulerGamma) * std::log(static_cast<long double>(threshold_T(static_cast<double>(x))));
  return static_cast<double>(scale * sum);
}

long double model_expectation_bateman_horn(const PolynomialFamily& family, std::uint64_t x,
                                           const ModelParameters& params) {
  params.validate();
  required_sample_limit(family, x);
  const auto& members = family.members();
  return ordered_sum(1, x, [&](std::uint64_t n) -> long double {
    std::uint64_t values[16];
    std::size_t distinct = 0;
    long double product = 1.0L;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const __int128 v = value_at(members[i], n);
      if (v < 2) return 0.0L;
      const auto u = static_cast<std::uint64_t>(v);
      if (std::find(values, values + distinct, u) != values + distinct) continue;
      if (distinct < 16) values[distinct++] = u;
      product *= membership_probability(u, params);
      if (product == 0.0L) return 0.0L;
    }
    return product;
  });
}

long double model_expectation_goldbach(std::uint64_t N, const ModelParameters& params) {
  if (N % 2 != 0) throw DomainError("Goldbach expectation needs even N");
  params.validate();
  if (N < 4) return 0.0L;
  return ordered_sum(2, N - 2, [&](std::uint64_t n) -> long double {
    const long double a = membership_probability(n, params);
    if (a == 0.0L) return 0.0L;
    if (2 * n == N) return a;
    return a * membership_probability(N - n, params);
  });
}

long double model_expectation_prime_members(std::uint64_t x, const PrimeTable& primes, const ModelParameters& params) {
  params.validate();
  if (primes.limit() < x) throw ValidationError("prime table does not reach x = " + std::to_string(x));
  long double sum = 0.0L;
  primes.for_each_prime(2, x, [&](std::uint64_t p) { sum += membership_probability(p, params); });
  return sum;
}

// ---------------------------------------------------------------------------
// Kim-Vu

double kimvu_threshold(unsigned k, double lambda, double E, double E_prime) {
  const double kk = static_cast<double>(k);
  return std::pow(8.0, kk) * std::sqrt(std::tgamma(kk + 1.0)) * std::pow(lambda, kk) * std::sqrt(E_prime * E);
}

KimVuCertificate make_kimvu_certificate(unsigned k, std::uint64_t n_vars, double lambda, double E_prime,
                                        std::span<const std::uint64_t> observed) {
  if (observed.size() < kMinimumCertificateSeeds) {
    throw ValidationError("a Kim-Vu certificate needs at least " + std::to_string(kMinimumCertificateSeeds) +
                          " seeds, got " + std::to_string(observed.size()));
  }
  if (!(lambda >= 1)) throw ValidationError("Kim-Vu lambda must be >= 1");
  long double total = 0.0L;
  for (const auto y : observed) total += static_cast<long double>(y);
  const double mean = static_cast<double>(total / static_cast<long double>(observed.size()));

  KimVuCertificate cert;
  cert.k = k;
  cert.n_vars = n_vars;
  cert.lambda = lambda;
  cert.E_prime = E_prime;
  cert.E = std::max(mean, E_prime);
  cert.threshold = kimvu_threshold(k, lambda, cert.E, E_prime);
  for (const auto y : observed) {
    const double dev = std::fabs(static_cast<double>(y) - mean);
    cert.observed_deviations.push_back(dev);
    cert.violations += dev > cert.threshold;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Ensembles

void ExperimentConfig::validate() const {
  if (n_min < kMinimumSupport) throw ValidationError("n_min must be at least 16");
  if (!(constants_T >= 3)) throw DomainError("constants truncation T must be >= 3");
  if (sweep_points == 0) throw ValidationError("sweep needs at least one point");
  if (lambda && !(*lambda >= 1)) throw ValidationError("Kim-Vu lambda must be >= 1");
  switch (kind) {
    case ExperimentKind::bateman_horn:
      if (family.empty()) throw ValidationError("bateman_horn experiment needs a family");
      if (x < 100) throw DomainError("bateman_horn experiment needs x >= 100");
      break;
    case ExperimentKind::goldbach:
      if (N % 2 != 0) throw DomainError("Goldbach experiment needs even N, got " + std::to_string(N));
      if (N < 100) throw DomainError("Goldbach experiment needs N >= 100");
      break;
    case ExperimentKind::prime_density:
      if (x < 1000) throw DomainError("prime_density experiment needs x >= 1000");
      break;
  }
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::uint64_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::uint64_t i = 0; i < count; ++i) seeds[i] = base + i;
  return seeds;
}

std::vector<std::uint64_t> sweep_checkpoints(const ExperimentConfig& config) {
  const bool goldbach = config.kind == ExperimentKind::goldbach;
  const std::uint64_t target = goldbach ? config.N : config.x;
  const std::uint64_t lower = std::max<std::uint64_t>(1000, target / 1000);
  std::vector<std::uint64_t> points;
  if (config.sweep_points > 1 && lower < target) {
    const double ratio = static_cast<double>(target) / static_cast<double>(lower);
    for (unsigned j = 0; j + 1 < config.sweep_points; ++j) {
      auto v = static_cast<std::uint64_t>(
          std::llround(static_cast<double>(lower) * std::pow(ratio, double(j) / (config.sweep_points - 1))));
      if (goldbach) v -= v % 2;
      if (v < target) points.push_back(v);
    }
  }
  points.push_back(target);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

namespace {

struct Setup {
  std::optional<PolynomialFamily> family;
  std::uint64_t sample_hi = 0;
  std::optional<PrimeTable> primes;  // prime_density only
};

Setup prepare(const ExperimentConfig& config) {
  Setup s;
  switch (config.kind) {
    case ExperimentKind::bateman_horn: {
      PolynomialFamily family = check_admissibility(PolynomialFamily::parse(config.family));
      if (family.admissibility() == Admissibility::no) {
        throw DomainError("family {" + family.to_string() + "} is not admissible: omega_f(p) = p at p = " +
                          std::to_string(*family.obstruction()));
      }
      s.sample_hi = required_sample_limit(family, config.x);
      s.family = std::move(family);
      break;
    }
    case ExperimentKind::goldbach: s.sample_hi = config.N; break;
    case ExperimentKind::prime_density:
      s.sample_hi = config.x;
      s.primes.emplace(config.x);
      break;
  }
  return s;
}

// counts[s][j] for seed s and checkpoint j.
std::vector<std::vector<std::uint64_t>> collect_counts(const ExperimentConfig& config, const Setup& setup,
                                                       std::span<const std::uint64_t> seeds,
                                                       const std::vector<std::uint64_t>& checkpoints) {
  if (seeds.empty()) throw ValidationError("an ensemble needs at least one seed");
  require_within_budget(8 * ((setup.sample_hi - 2) / 64 + 1), "per-seed sample bitset");
  std::vector<std::vector<std::uint64_t>> counts(seeds.size(), std::vector<std::uint64_t>(checkpoints.size()));
  std::exception_ptr failure;
  const auto total = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < total; ++s) {
    try {
      const ModelParameters params{seeds[static_cast<std::size_t>(s)], config.n_min};
      const SampledSet sample = serial::sample_range(2, setup.sample_hi, params);
      auto& row = counts[static_cast<std::size_t>(s)];
      for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        switch (config.kind) {
          case ExperimentKind::bateman_horn:
            row[j] = serial::count_bateman_horn(sample, *setup.family, checkpoints[j]);
            break;
          case ExperimentKind::goldbach: row[j] = serial::count_goldbach(sample, checkpoints[j]); break;
          case ExperimentKind::prime_density:
            row[j] = serial::count_prime_members(sample, *setup.primes, checkpoints[j]);
            break;
        }
      }
    } catch (...) {
#pragma omp critical(cgmodel_ensemble_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return counts;
}

KimVuCertificate certificate_for(const ExperimentConfig& config, const Setup& setup,
                                 std::span<const std::uint64_t> observed) {
  switch (config.kind) {
    case ExperimentKind::bateman_horn: {
      const unsigned k = setup.family->k();
      const double lambda = config.lambda.value_or((k + 1) * std::log(static_cast<double>(config.x)));
      return make_kimvu_certificate(k, setup.sample_hi - 1, lambda, static_cast<double>(k), observed);
    }
    case ExperimentKind::goldbach: {
      const double lambda = config.lambda.value_or(2.0 * std::log(static_cast<double>(config.N)));
      return make_kimvu_certificate(2, config.N - 3, lambda, 2.0, observed);
    }
    case ExperimentKind::prime_density: break;
  }
  throw ValidationError("Kim-Vu certificates are defined for bateman_horn and goldbach experiments");
}

}  // namespace

KimVuCertificate kimvu_certificate(const ExperimentConfig& config, std::span<const std::uint64_t> seeds) {
  config.validate();
  if (config.kind == ExperimentKind::prime_density) {
    throw ValidationError("Kim-Vu certificates are defined for bateman_horn and goldbach experiments");
  }
  if (seeds.size() < kMinimumCertificateSeeds) {
    throw ValidationError("a Kim-Vu certificate needs at least " + std::to_string(kMinimumCertificateSeeds) +
                          " seeds, got " + std::to_string(seeds.size()));
  }
  const Setup setup = prepare(config);
  const std::uint64_t target = config.kind == ExperimentKind::goldbach ? config.N : config.x;
  const auto counts = collect_counts(config, setup, seeds, {target});
  std::vector<std::uint64_t> observed;
  for (const auto& row : counts) observed.push_back(row.front());
  return certificate_for(config, setup, observed);
}

CountReport run_ensemble(const ExperimentConfig& config, std::span<const std::uint64_t> seeds) {
  config.validate();
  const Setup setup = prepare(config);
  const auto checkpoints = sweep_checkpoints(config);
  const auto counts = collect_counts(config, setup, seeds, checkpoints);
  const ModelParameters model{0, config.n_min};

  CountReport report;
  report.config = config;
  report.seeds.assign(seeds.begin(), seeds.end());
  for (const auto& row : counts) report.observed.push_back(row.back());

  std::vector<double> predicted(checkpoints.size());
  nlohmann::json details = nlohmann::json::object();
  switch (config.kind) {
    case ExperimentKind::bateman_horn: {
      const PolynomialFamily& family = *setup.family;
      const PrimeTable table(floor_to_u64(config.constants_T));
      const SingularSeriesEstimate cf = compute_Cf(family, config.constants_T, table);
      for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        predicted[j] = checkpoints[j] >= 100 ? predict_bateman_horn(family, checkpoints[j], cf) : 0.0;
      }
      report.model_expectation = static_cast<double>(model_expectation_bateman_horn(family, config.x, model));
      details["family"] = family.to_string();
      details["k"] = family.k();
      details["degree_sum"] = family.product_degree();
      details["degree_product"] = family.degree_product();
      details["C_f"] = static_cast<double>(cf.value);
      details["C_f_tail_error"] = cf.tail_error;
      details["C_f_tail_error_kind"] = "heuristic (fitted to last-decade drift, not a bound)";
      details["C_f_converged_fast"] = cf.converged_fast;
      details["admissibility"] = to_string(family.admissibility());
      details["admissibility_note"] = family.admissibility_note();
      nlohmann::json screens = nlohmann::json::array();
      for (const auto& m : family.members()) {
        const auto verdict = irreducibility_screen(m, 1000);
        nlohmann::json v{{"member", m.to_string()}, {"verdict", to_string(verdict.kind)}};
        if (verdict.witness_prime) v["witness_prime"] = *verdict.witness_prime;
        if (!verdict.factors.empty()) {
          nlohmann::json factors = nlohmann::json::array();
          for (const auto& f : verdict.factors) factors.push_back(f.to_string());
          v["factors"] = factors;
        }
        screens.push_back(v);
      }
      details["irreducibility"] = screens;
      break;
    }
    case ExperimentKind::goldbach: {
      const long double c2 = compute_C2(config.constants_T);
      for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        predicted[j] = checkpoints[j] >= 100 ? predict_goldbach(checkpoints[j], c2, goldbach_local_factor(checkpoints[j])) : 0.0;
      }
      const auto local = goldbach_local_factor(config.N);
      report.model_expectation = static_cast<double>(model_expectation_goldbach(config.N, model));
      details["C2"] = static_cast<double>(c2);
      details["local_factor"] = static_cast<double>(local.value);
      details["odd_prime_divisors"] = local.odd_prime_divisors;
      break;
    }
    case ExperimentKind::prime_density: {
      for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        predicted[j] = checkpoints[j] >= 1000 ? predict_prime_members(checkpoints[j], *setup.primes) : 0.0;
      }
      report.model_expectation =
          static_cast<double>(model_expectation_prime_members(config.x, *setup.primes, model));
      const double T = threshold_T(static_cast<double>(config.x));
      const auto r = TruncationSchedule::instance().prime_count(config.x);
      details["threshold_T"] = T;
      details["exp_gamma_log_T"] = static_cast<double>(std::exp(kEulerGamma) * std::log(static_cast<long double>(T)));
      details["mertens_weight_at_x"] = TruncationSchedule::instance().weight(r);
      break;
    }
  }
  details["sample_range"] = {2, setup.sample_hi};
  report.details = std::move(details);

  long double total = 0.0L;
  for (const auto y : report.observed) total += static_cast<long double>(y);
  const long double mean = total / static_cast<long double>(report.observed.size());
  long double squares = 0.0L;
  for (const auto y : report.observed) squares += (static_cast<long double>(y) - mean) * (static_cast<long double>(y) - mean);
  report.mean = static_cast<double>(mean);
  report.stddev = report.observed.size() > 1
                      ? static_cast<double>(std::sqrt(squares / static_cast<long double>(report.observed.size() - 1)))
                      : 0.0;
  report.predicted = predicted.back();
  report.ratio = report.predicted > 0 ? report.mean / report.predicted : 0.0;

  for (std::size_t j = 0; j < checkpoints.size(); ++j) {
    long double s = 0.0L;
    for (const auto& row : counts) s += static_cast<long double>(row[j]);
    report.sweep.push_back({checkpoints[j], static_cast<double>(s / static_cast<long double>(counts.size())), predicted[j]});
  }

  if (config.kind != ExperimentKind::prime_density && report.observed.size() >= kMinimumCertificateSeeds) {
    report.certificate = certificate_for(config, setup, report.observed);
  }
  return report;
}

}  // namespace cgmodel
