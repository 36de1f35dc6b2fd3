#pragma once

// Prime generation, counting, primorials, Mertens products and 64-bit
// factorization. Everything else in the library sits on top of this.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cgmodel {

using BigInt = boost::multiprecision::cpp_int;

/// Odd-only primality bitset up to `limit`, with cumulative popcount
/// checkpoints so that pi(n) costs one table lookup plus a few popcounts.
///
/// Immutable after construction; share freely between threads.
class PrimeTable {
 public:
  /// Bits per checkpoint block (8 words of odd numbers, i.e. 1024 integers).
  static constexpr std::uint64_t kBlockWords = 8;

  /// Builds the table with a segmented sieve. Requires limit >= 2 and a
  /// bitset that fits the memory budget.
  explicit PrimeTable(std::uint64_t limit);

  std::uint64_t limit() const noexcept { return limit_; }

  /// n must not exceed limit().
  bool is_prime(std::uint64_t n) const;

  /// Number of primes <= n; n must not exceed limit().
  std::uint64_t pi(std::uint64_t n) const;

  /// All primes <= min(n, limit()) in increasing order.
  std::vector<std::uint64_t> primes_up_to(std::uint64_t n) const;
  std::vector<std::uint64_t> primes() const { return primes_up_to(limit_); }

  /// Calls fn(p) for each prime p in [lo, hi] in increasing order.
  template <class Fn>
  void for_each_prime(std::uint64_t lo, std::uint64_t hi, Fn&& fn) const;

  /// Raw odd-only words: bit i of word w set iff 2*(64w+i)+1 is prime.
  std::span<const std::uint64_t> odd_words() const noexcept { return words_; }

 private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> checkpoints_;  // primes among odd indices before block b
};

/// Same as constructing a PrimeTable; throws DomainError for limit < 2 and
/// ResourceError when the bitset exceeds the memory budget.
PrimeTable sieve(std::uint64_t limit);

/// Product of all primes <= T, exact. T >= 2.
BigInt primorial(double T);

enum class MertensKind { inverse, direct };

/// Finite Euler product over p <= T of (1-1/p)^(-k) (inverse) or (1-1/p)^k
/// (direct), accumulated as a sum of logarithms in extended precision.
struct MertensProduct {
  double truncation;
  unsigned k;
  MertensKind kind;
  long double value;
};

MertensProduct mertens_product(double T, unsigned k, MertensKind kind);
MertensProduct mertens_product(double T, unsigned k, MertensKind kind, const PrimeTable& table);

/// Sum over p <= T of log(1 - 1/p) in long double, fixed increasing order.
long double log_mertens_sum(double T, const PrimeTable& table);

inline constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Complete factorization in increasing prime order; factorize(1) is empty.
std::vector<PrimePower> factorize(std::uint64_t n);
std::vector<PrimePower> factorize(std::uint64_t n, const PrimeTable& table);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(std::uint64_t n);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Largest integer <= T, clamped to the 64-bit range; T must be finite.
std::uint64_t floor_to_u64(double T);

template <class Fn>
void PrimeTable::for_each_prime(std::uint64_t lo, std::uint64_t hi, Fn&& fn) const {
  if (hi > limit_) hi = limit_;
  if (lo <= 2 && hi >= 2) fn(std::uint64_t{2});
  if (hi < 3) return;
  const std::uint64_t first = lo <= 3 ? 1 : lo / 2;  // odd index of smallest odd >= lo
  if (first > (hi - 1) / 2) return;
  const std::uint64_t last = (hi - 1) / 2;
  for (std::uint64_t w = first / 64; w <= last / 64; ++w) {
    std::uint64_t bits = words_[w];
    if (w == first / 64) bits &= ~std::uint64_t{0} << (first % 64);
    if (w == last / 64 && last % 64 != 63) bits &= (std::uint64_t{1} << (last % 64 + 1)) - 1;
    while (bits != 0) {
      const unsigned bit = static_cast<unsigned>(std::countr_zero(bits));
      fn(2 * (w * 64 + bit) + 1);
      bits &= bits - 1;
    }
  }
}

}  // namespace cgmodel
