#include "cgmodel/singular_series.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cgmodel/error.hpp"

namespace cgmodel {

namespace {

constexpr int kCheckpoints = 16;     // per decade
constexpr int kCheckpointsUsed = 12; // drop the points closest to T

PolynomialFamily ensure_checked(const PolynomialFamily& family) {
  PolynomialFamily checked = family.admissibility() == Admissibility::unchecked ? check_admissibility(family) : family;
  if (checked.admissibility() == Admissibility::no) {
    throw DomainError("family {" + family.to_string() + "} is not admissible: omega_f(p) = p at p = " +
                      std::to_string(*checked.obstruction()));
  }
  return checked;
}

}  // namespace

namespace serial {

std::vector<std::uint32_t> omega_sweep(const PolynomialFamily& family, const std::vector<std::uint64_t>& primes) {
  std::vector<std::uint32_t> out(primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) out[i] = static_cast<std::uint32_t>(family.omega(primes[i]));
  return out;
}

}  // namespace serial

std::vector<std::uint32_t> omega_sweep(const PolynomialFamily& family, const std::vector<std::uint64_t>& primes) {
  std::vector<std::uint32_t> out(primes.size());
  const auto n = static_cast<std::int64_t>(primes.size());
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(family.omega(primes[static_cast<std::size_t>(i)]));
  }
  return out;
}

SingularSeriesEstimate compute_Cf(const PolynomialFamily& family, double T, const PrimeTable& table) {
  if (!(T >= 2)) throw DomainError("C_f truncation must satisfy T >= 2");
  const PolynomialFamily checked = ensure_checked(family);
  const std::uint64_t hi = floor_to_u64(T);
  if (hi > table.limit()) {
    throw DomainError("C_f truncation " + std::to_string(hi) + " beyond sieve limit " + std::to_string(table.limit()));
  }
  const auto primes = table.primes_up_to(hi);
  const auto omegas = omega_sweep(checked, primes);
  const long double k = checked.k();

  std::array<double, kCheckpoints + 1> marks{};
  std::array<long double, kCheckpoints + 1> partial{};
  std::array<bool, kCheckpoints + 1> seen{};
  for (int j = 0; j <= kCheckpoints; ++j) marks[j] = T * std::pow(10.0, (j - kCheckpoints) / double(kCheckpoints));

  long double log_sum = 0.0L;
  int next = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto p = static_cast<long double>(primes[i]);
    while (next <= kCheckpoints && p > marks[next]) {
      partial[next] = log_sum;
      seen[next] = true;
      ++next;
    }
    const long double log_unit = std::log1p(-1.0L / p);
    log_sum += -k * log_unit + std::log1p(-static_cast<long double>(omegas[i]) / p);
  }
  for (; next <= kCheckpoints; ++next) {
    partial[next] = log_sum;
    seen[next] = true;
  }

  SingularSeriesEstimate est;
  est.family = checked.to_string();
  est.k = checked.k();
  est.truncation = T;
  est.value = std::exp(log_sum);
  est.converged_fast = checked.all_linear();

  double tail_log = 0;
  for (int j = 0; j <= kCheckpointsUsed; ++j) {
    const double t = marks[j];
    if (!seen[j] || t < 2 || t >= T) continue;
    const double drift = static_cast<double>(std::fabs(partial[j] - log_sum));
    if (est.converged_fast) {
      tail_log = std::max(tail_log, drift / (1.0 / t - 1.0 / T) / T);
    } else {
      tail_log = std::max(tail_log, drift / (1.0 / std::log(t) - 1.0 / std::log(T)) / std::log(T));
    }
  }
  est.tail_error = static_cast<double>(est.value) * std::expm1(tail_log);
  return est;
}

SingularSeriesEstimate compute_Cf(const PolynomialFamily& family, double T) {
  if (!(T >= 2)) throw DomainError("C_f truncation must satisfy T >= 2");
  return compute_Cf(family, T, PrimeTable(floor_to_u64(T)));
}

long double compute_C2(double T, const PrimeTable& table) {
  if (!(T >= 3)) throw DomainError("C_2 truncation must satisfy T >= 3");
  const std::uint64_t hi = floor_to_u64(T);
  if (hi > table.limit()) {
    throw DomainError("C_2 truncation " + std::to_string(hi) + " beyond sieve limit " + std::to_string(table.limit()));
  }
  long double log_sum = 0.0L;
  table.for_each_prime(3, hi, [&](std::uint64_t p) {
    const long double q = static_cast<long double>(p - 1);
    log_sum += std::log1p(-1.0L / (q * q));
  });
  return std::exp(log_sum);
}

long double compute_C2(double T) {
  if (!(T >= 3)) throw DomainError("C_2 truncation must satisfy T >= 3");
  return compute_C2(T, PrimeTable(floor_to_u64(T)));
}

GoldbachLocalFactor goldbach_local_factor(std::uint64_t N) {
  if (N % 2 != 0) throw DomainError("Goldbach local factor needs even N, got " + std::to_string(N));
  if (N < 4) throw DomainError("Goldbach local factor needs N >= 4, got " + std::to_string(N));
  GoldbachLocalFactor out;
  out.N = N;
  for (const auto& [p, e] : factorize(N)) {
    (void)e;
    if (p == 2) continue;
    out.odd_prime_divisors.push_back(p);
    out.value *= static_cast<long double>(p - 1) / static_cast<long double>(p - 2);
  }
  return out;
}

Lemma2Residuals lemma2_check(unsigned k, double T) {
  if (k == 0) throw DomainError("lemma2_check needs k >= 1");
  if (!(T >= 100)) throw DomainError("lemma2_check needs T >= 100");
  const PrimeTable table(floor_to_u64(T));
  const long double L = std::log(static_cast<long double>(T));
  const long double product = mertens_product(T, k, MertensKind::inverse, table).value;
  const long double main = std::exp(k * kEulerGamma) * std::pow(L, static_cast<long double>(k));
  Lemma2Residuals out;
  out.k = k;
  out.truncation = T;
  out.mertens = static_cast<double>(std::fabs(product - main) / std::pow(L, static_cast<long double>(k) - 1));
  return out;
}

Lemma2Residuals lemma2_check(const PolynomialFamily& family, double T, double reference_T) {
  if (!(reference_T >= T)) throw DomainError("lemma2_check reference truncation must be >= T");
  Lemma2Residuals out = lemma2_check(family.k(), T);
  const PrimeTable table(floor_to_u64(reference_T));
  const PolynomialFamily checked = ensure_checked(family);
  const unsigned k = checked.k();
  const auto primes = table.primes_up_to(floor_to_u64(T));
  const auto omegas = omega_sweep(checked, primes);
  long double log_direct = 0.0L;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    log_direct += std::log1p(-static_cast<long double>(omegas[i]) / static_cast<long double>(primes[i]));
  }
  const long double cf = compute_Cf(checked, reference_T, table).value;
  const long double L = std::log(static_cast<long double>(T));
  const long double main = cf * std::exp(-(k * kEulerGamma)) * std::pow(L, -static_cast<long double>(k));
  out.singular = static_cast<double>(std::fabs(std::exp(log_direct) - main) * std::pow(L, k + 1.0L));
  out.reference_truncation = reference_T;
  return out;
}

}  // namespace cgmodel
