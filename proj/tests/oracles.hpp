#pragma once

// Slow, independent reference computations used only by the tests. Nothing
// here calls into the code paths it is used to check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cgmodel/sampler.hpp"

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;

inline bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> primes_trial(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    bool prime = true;
    for (const auto p : out) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(n);
  }
  return out;
}

/// f given as int64 coefficients, constant term first.
inline __int128 eval(const std::vector<std::int64_t>& f, std::int64_t n) {
  __int128 acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * n + *it;
  return acc;
}

/// #{l in [0, p) : f(l) = 0 mod p}, scanning every residue.
inline std::uint64_t roots_mod_p(const std::vector<std::int64_t>& f, std::uint64_t p) {
  const auto P = static_cast<__int128>(p);
  std::uint64_t count = 0;
  for (std::uint64_t l = 0; l < p; ++l) {
    __int128 acc = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) {
      acc = (acc * static_cast<__int128>(l) + *it) % P;
    }
    count += acc == 0;
  }
  return count;
}

/// Resultant of f and g via the Sylvester matrix and fraction-free
/// (Bareiss) elimination over the integers.
inline BigInt resultant(const std::vector<BigInt>& f, const std::vector<BigInt>& g) {
  const std::size_t m = f.size() - 1, n = g.size() - 1, size = m + n;
  std::vector<std::vector<BigInt>> a(size, std::vector<BigInt>(size, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j <= m; ++j) a[r][r + j] = f[m - j];
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j <= n; ++j) a[n + r][r + j] = g[n - j];
  }
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < size; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < size && a[swap][k] == 0) ++swap;
      if (swap == size) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      for (std::size_t j = k + 1; j < size; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    }
    prev = a[k][k];
  }
  return sign * a[size - 1][size - 1];
}

/// Integral of f over [a, b] by composite Simpson in u = log t, with
/// panel doubling and Richardson extrapolation until two successive
/// extrapolants agree to `rel`.
inline double log_substituted_integral(const std::function<double(double)>& f, double a, double b,
                                       double rel = 1e-13) {
  const double ua = std::log(a), ub = std::log(b);
  auto g = [&](double u) {
    const double t = std::exp(u);
    return f(t) * t;
  };
  auto simpson = [&](std::uint64_t panels) {
    const double h = (ub - ua) / static_cast<double>(panels);
    long double s = g(ua) + g(ub);
    for (std::uint64_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0L : 2.0L) * g(ua + h * static_cast<double>(i));
    return static_cast<double>(s * h / 3.0L);
  };
  std::uint64_t panels = 64;
  double coarse = simpson(panels);
  double previous = 0;
  for (int round = 0; round < 20; ++round) {
    panels *= 2;
    const double fine = simpson(panels);
    const double extrapolated = (16.0 * fine - coarse) / 15.0;
    if (round > 0 && std::fabs(extrapolated - previous) <= rel * std::fabs(extrapolated)) return extrapolated;
    previous = extrapolated;
    coarse = fine;
  }
  return previous;
}

/// Membership flags of a sample read straight from its words.
inline std::vector<char> member_flags(const cgmodel::SampledSet& s) {
  std::vector<char> flags(s.hi() - s.lo() + 1, 0);
  const auto words = s.words();
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = static_cast<char>((words[i / 64] >> (i % 64)) & 1U);
  return flags;
}

inline std::uint64_t count_family(const cgmodel::SampledSet& s, const std::vector<std::vector<std::int64_t>>& members,
                                  std::uint64_t x) {
  const auto flags = member_flags(s);
  auto in = [&](__int128 v) {
    return v >= static_cast<__int128>(s.lo()) && v <= static_cast<__int128>(s.hi()) &&
           flags[static_cast<std::size_t>(v - static_cast<__int128>(s.lo()))] != 0;
  };
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    bool all = true;
    for (const auto& f : members) {
      const __int128 v = eval(f, static_cast<std::int64_t>(n));
      all = all && v >= 2 && in(v);
    }
    count += all;
  }
  return count;
}

/// Ordered pairs (a, b) of sample members with a + b = N.
inline std::uint64_t count_pairs(const cgmodel::SampledSet& s, std::uint64_t N) {
  std::vector<std::uint64_t> members;
  const auto flags = member_flags(s);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) members.push_back(s.lo() + i);
  }
  std::uint64_t count = 0;
  for (const auto a : members) {
    for (const auto b : members) count += a + b == N;
  }
  return count;
}

/// popcount(sample AND primes) over [lo, x], word by word.
inline std::uint64_t count_prime_members(const cgmodel::SampledSet& s, std::uint64_t x) {
  const auto primes = primes_trial(x);
  std::vector<std::uint64_t> prime_words(s.words().size(), 0);
  for (const auto p : primes) {
    if (p < s.lo() || p > s.hi()) continue;
    const std::uint64_t i = p - s.lo();
    prime_words[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  std::uint64_t count = 0;
  for (std::size_t w = 0; w < prime_words.size(); ++w) count += std::popcount(prime_words[w] & s.words()[w]);
  return count;
}

/// Random polynomial with degree in [1, max_degree], coefficients in
/// [-bound, bound] and leading coefficient in [1, bound].
inline std::vector<std::int64_t> random_polynomial(std::mt19937_64& rng, unsigned max_degree, std::int64_t bound) {
  std::uniform_int_distribution<unsigned> deg(1, max_degree);
  std::uniform_int_distribution<std::int64_t> coef(-bound, bound), lead(1, bound);
  std::vector<std::int64_t> f(deg(rng) + 1);
  for (auto& c : f) c = coef(rng);
  f.back() = lead(rng);
  return f;
}

}  // namespace oracle
