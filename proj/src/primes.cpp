#include "cgmodel/primes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "cgmodel/error.hpp"
#include "cgmodel/memory_budget.hpp"

namespace cgmodel {

namespace {

constexpr std::uint64_t kSegmentIndices = std::uint64_t{1} << 18;

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

// Plain sieve of Eratosthenes for the base primes of the segmented sieve.
std::vector<std::uint64_t> small_odd_primes(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 3) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 3; i <= limit; i += 2) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += 2 * i) composite[j] = true;
  }
  return out;
}

}  // namespace

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
  if (limit < 2) {
    throw DomainError("sieve limit must be at least 2, got " + std::to_string(limit));
  }
  const std::uint64_t odd_count = (limit - 1) / 2 + 1;  // indices 0..(limit-1)/2
  const std::uint64_t word_count = (odd_count + 63) / 64;
  const std::uint64_t block_count = (word_count + kBlockWords - 1) / kBlockWords;
  require_within_budget(8 * (word_count + block_count + 1), "prime sieve up to " + std::to_string(limit));

  words_.assign(word_count, ~std::uint64_t{0});
  words_[0] &= ~std::uint64_t{1};  // 1 is not prime
  if (odd_count % 64 != 0) words_.back() &= (std::uint64_t{1} << (odd_count % 64)) - 1;

  const auto base = small_odd_primes(isqrt(limit));
  for (std::uint64_t seg_lo = 0; seg_lo < odd_count; seg_lo += kSegmentIndices) {
    const std::uint64_t seg_hi = std::min(odd_count, seg_lo + kSegmentIndices);
    const std::uint64_t low_value = 2 * seg_lo + 1;
    for (const std::uint64_t p : base) {
      const std::uint64_t square = p * p;
      if (square > 2 * (seg_hi - 1) + 1) break;
      std::uint64_t m = square;
      if (m < low_value) {
        m = (low_value + p - 1) / p * p;
        if (m % 2 == 0) m += p;
      }
      for (std::uint64_t idx = (m - 1) / 2; idx < seg_hi; idx += p) {
        words_[idx / 64] &= ~(std::uint64_t{1} << (idx % 64));
      }
    }
  }

  checkpoints_.resize(block_count + 1);
  std::uint64_t running = 0;
  for (std::uint64_t b = 0; b < block_count; ++b) {
    checkpoints_[b] = running;
    const std::uint64_t end = std::min(word_count, (b + 1) * kBlockWords);
    for (std::uint64_t w = b * kBlockWords; w < end; ++w) running += std::popcount(words_[w]);
  }
  checkpoints_[block_count] = running;
}

bool PrimeTable::is_prime(std::uint64_t n) const {
  if (n > limit_) {
    throw DomainError("is_prime(" + std::to_string(n) + ") beyond sieve limit " + std::to_string(limit_));
  }
  if (n < 3) return n == 2;
  if (n % 2 == 0) return false;
  const std::uint64_t idx = (n - 1) / 2;
  return (words_[idx / 64] >> (idx % 64)) & 1U;
}

std::uint64_t PrimeTable::pi(std::uint64_t n) const {
  if (n > limit_) {
    throw DomainError("pi(" + std::to_string(n) + ") beyond sieve limit " + std::to_string(limit_));
  }
  if (n < 2) return 0;
  const std::uint64_t last = (n - 1) / 2;
  const std::uint64_t w = last / 64;
  const std::uint64_t block = w / kBlockWords;
  std::uint64_t count = checkpoints_[block];
  for (std::uint64_t i = block * kBlockWords; i < w; ++i) count += std::popcount(words_[i]);
  const unsigned used = static_cast<unsigned>(last % 64) + 1;
  const std::uint64_t mask = used == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << used) - 1;
  count += std::popcount(words_[w] & mask);
  return count + 1;  // the prime 2
}

std::vector<std::uint64_t> PrimeTable::primes_up_to(std::uint64_t n) const {
  std::vector<std::uint64_t> out;
  const std::uint64_t hi = std::min(n, limit_);
  out.reserve(hi < 2 ? 0 : pi(hi));
  for_each_prime(2, hi, [&](std::uint64_t p) { out.push_back(p); });
  return out;
}

PrimeTable sieve(std::uint64_t limit) { return PrimeTable(limit); }

std::uint64_t floor_to_u64(double T) {
  if (!std::isfinite(T)) throw DomainError("truncation point must be finite");
  if (T <= 0) return 0;
  if (T >= 18446744073709551615.0) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::floor(T));
}

BigInt primorial(double T) {
  if (!(T >= 2)) throw DomainError("primorial requires T >= 2");
  const PrimeTable table(floor_to_u64(T));
  BigInt product = 1;
  table.for_each_prime(2, table.limit(), [&](std::uint64_t p) { product *= p; });
  return product;
}

long double log_mertens_sum(double T, const PrimeTable& table) {
  const std::uint64_t hi = floor_to_u64(T);
  if (hi > table.limit()) {
    throw DomainError("truncation " + std::to_string(hi) + " beyond sieve limit " +
                      std::to_string(table.limit()));
  }
  long double sum = 0.0L;
  table.for_each_prime(2, hi, [&](std::uint64_t p) { sum += std::log1p(-1.0L / static_cast<long double>(p)); });
  return sum;
}

MertensProduct mertens_product(double T, unsigned k, MertensKind kind, const PrimeTable& table) {
  if (!(T >= 2)) throw DomainError("Mertens product requires T >= 2");
  if (k == 0) throw DomainError("Mertens product requires k >= 1");
  const long double log_sum = log_mertens_sum(T, table);
  const long double sign = kind == MertensKind::inverse ? -1.0L : 1.0L;
  return {T, k, kind, std::exp(sign * static_cast<long double>(k) * log_sum)};
}

MertensProduct mertens_product(double T, unsigned k, MertensKind kind) {
  if (!(T >= 2)) throw DomainError("Mertens product requires T >= 2");
  return mertens_product(T, k, kind, PrimeTable(floor_to_u64(T)));
}

// ---------------------------------------------------------------------------
// 64-bit modular arithmetic and factorization

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  // The first twelve primes are a deterministic witness set below 3.3e24.
  static constexpr std::uint64_t kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (const std::uint64_t p : kWitnesses) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1U) == 0) {
    d >>= 1;
    ++r;
  }
  for (const std::uint64_t a : kWitnesses) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

// Brent's variant of Pollard rho; n must be odd and composite.
std::uint64_t pollard_brent(std::uint64_t n) {
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, x = 2, q = 1, g = 1, ys = 2;
    const std::uint64_t m = 128;
    std::uint64_t r = 1;
    auto step = [&](std::uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = step(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = step(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split_cofactor(std::uint64_t n, std::map<std::uint64_t, unsigned>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    ++out[n];
    return;
  }
  const std::uint64_t d = pollard_brent(n);
  split_cofactor(d, out);
  split_cofactor(n / d, out);
}

const std::vector<std::uint64_t>& factor_primes() {
  static const std::vector<std::uint64_t> primes = PrimeTable(std::uint64_t{1} << 20).primes();
  return primes;
}

// Trial division by `primes` (all primes up to `covered`), then rho splitting
// for whatever cofactor cannot be certified prime by the bound covered^2.
std::vector<PrimePower> factorize_with(std::uint64_t n, const std::vector<std::uint64_t>& primes,
                                       std::uint64_t covered) {
  std::vector<PrimePower> out;
  if (n <= 1) return out;
  bool stopped = false;  // a prime exceeded sqrt of the cofactor
  for (const std::uint64_t p : primes) {
    if (p > n / p) {
      stopped = true;
      break;
    }
    if (n % p != 0) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (n == 1) return out;
  if (stopped || n / covered <= covered) {
    out.push_back({n, 1});
    return out;
  }
  std::map<std::uint64_t, unsigned> rest;
  split_cofactor(n, rest);
  for (const auto& [p, e] : rest) out.push_back({p, e});
  return out;
}

}  // namespace

std::vector<PrimePower> factorize(std::uint64_t n, const PrimeTable& table) {
  const std::uint64_t reach = std::min(table.limit(), isqrt(n));
  return factorize_with(n, table.primes_up_to(reach), std::max<std::uint64_t>(reach, 1));
}

std::vector<PrimePower> factorize(std::uint64_t n) {
  return factorize_with(n, factor_primes(), std::uint64_t{1} << 20);
}

}  // namespace cgmodel
