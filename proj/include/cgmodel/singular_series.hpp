#pragma once

// Truncated Euler products: the Bateman-Horn constant of a family, the
// twin-prime constant and the Goldbach local factor.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgmodel/polynomial.hpp"
#include "cgmodel/primes.hpp"

namespace cgmodel {

/// C_f(T) = prod_{p <= T} (1-1/p)^(-k) (1 - omega_f(p)/p).
///
/// tail_error is a heuristic absolute error, not a bound. It is fitted to
/// the drift of the partial log-products over the last decade [T/10, T]:
/// as c/log T in general, and as c'/T when every member is linear (then
/// omega_f(p) = k for all but finitely many p and the factors are 1 - O(p^-2)).
struct SingularSeriesEstimate {
  std::string family;
  unsigned k = 0;
  double truncation = 0;
  long double value = 0;
  double tail_error = 0;
  bool converged_fast = false;
};

/// Throws DomainError for T < 2 or an inadmissible family (naming the
/// obstructing prime). Unchecked families are checked on the fly.
SingularSeriesEstimate compute_Cf(const PolynomialFamily& family, double T);
SingularSeriesEstimate compute_Cf(const PolynomialFamily& family, double T, const PrimeTable& table);

/// omega_f(p) for every p in `primes`, in order. The OpenMP version splits
/// the prime list across threads; both produce identical vectors.
std::vector<std::uint32_t> omega_sweep(const PolynomialFamily& family, const std::vector<std::uint64_t>& primes);

/// prod_{3 <= p <= T} (1 - 1/(p-1)^2); T >= 3.
long double compute_C2(double T);
long double compute_C2(double T, const PrimeTable& table);

/// prod over odd primes p | N of (p-1)/(p-2). N even, N >= 4.
struct GoldbachLocalFactor {
  std::uint64_t N = 0;
  std::vector<std::uint64_t> odd_prime_divisors;
  long double value = 1;
};

GoldbachLocalFactor goldbach_local_factor(std::uint64_t N);

/// Scaled Mertens-type residuals:
///   mertens  = |prod (1-1/p)^-k - e^{k gamma} (log T)^k| / (log T)^(k-1)
///   singular = |prod (1-omega_f/p) - C_f e^{-k gamma} (log T)^-k| * (log T)^(k+1)
/// The second needs a family; its C_f is taken from a longer truncation.
struct Lemma2Residuals {
  unsigned k = 0;
  double truncation = 0;
  double mertens = 0;
  std::optional<double> singular;
  std::optional<double> reference_truncation;
};

Lemma2Residuals lemma2_check(unsigned k, double T);
Lemma2Residuals lemma2_check(const PolynomialFamily& family, double T, double reference_T);

namespace serial {
std::vector<std::uint32_t> omega_sweep(const PolynomialFamily& family, const std::vector<std::uint64_t>& primes);
}  // namespace serial

}  // namespace cgmodel
