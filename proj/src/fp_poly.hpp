#pragma once

// Dense polynomials over F_p, constant term first, always trimmed. Internal
// to the library.

#include <cstdint>
#include <vector>

#include "cgmodel/primes.hpp"

namespace cgmodel::fp {

using Poly = std::vector<std::uint64_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline std::uint64_t inverse(std::uint64_t a, std::uint64_t p) { return pow_mod(a, p - 2, p); }

inline Poly monic(Poly a, std::uint64_t p) {
  if (a.empty()) return a;
  const std::uint64_t inv = inverse(a.back(), p);
  for (auto& c : a) c = mul_mod(c, inv, p);
  return a;
}

/// a mod m with m monic and non-empty.
inline Poly rem(Poly a, const Poly& m, std::uint64_t p) {
  const int dm = degree(m);
  for (int i = degree(a); i >= dm; --i) {
    const std::uint64_t coef = a[static_cast<std::size_t>(i)];
    if (coef == 0) continue;
    const int shift = i - dm;
    for (int j = 0; j <= dm; ++j) {
      auto& slot = a[static_cast<std::size_t>(shift + j)];
      slot = (slot + p - mul_mod(coef, m[static_cast<std::size_t>(j)], p)) % p;
    }
  }
  trim(a);
  return a;
}

/// Remainder by an arbitrary non-zero modulus.
inline Poly rem_general(Poly a, const Poly& m, std::uint64_t p) {
  const Poly mm = monic(m, p);
  return rem(std::move(a), mm, p);
}

inline Poly mul_mod_poly(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] = (out[i + j] + mul_mod(a[i], b[j], p)) % p;
    }
  }
  trim(out);
  return rem(std::move(out), m, p);
}

/// base^e mod m, m monic of degree >= 1.
inline Poly pow_mod_poly(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
  Poly result = rem(Poly{1}, m, p);
  base = rem(std::move(base), m, p);
  while (e > 0) {
    if (e & 1U) result = mul_mod_poly(result, base, m, p);
    e >>= 1;
    if (e > 0) base = mul_mod_poly(base, base, m, p);
  }
  return result;
}

inline Poly sub(Poly a, const Poly& b, std::uint64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
  trim(a);
  return a;
}

/// Monic gcd; gcd(0, 0) is empty.
inline Poly gcd(Poly a, Poly b, std::uint64_t p) {
  while (!b.empty()) {
    Poly r = rem_general(std::move(a), b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(std::move(a), p);
}

}  // namespace cgmodel::fp
