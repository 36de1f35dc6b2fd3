#pragma once

// Integer polynomials, root counting modulo p and admissibility of families.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgmodel/primes.hpp"

namespace cgmodel {

/// Polynomial in Z[x], constant term first, trimmed, degree >= 1 and
/// positive leading coefficient.
class IntPolynomial {
 public:
  /// Throws ValidationError when the trimmed polynomial is constant or has a
  /// non-positive leading coefficient.
  explicit IntPolynomial(std::vector<BigInt> coefficients);

  /// Parses text such as "x^2+x+1", "2x^3 - 5", "3*x-1". Only integer
  /// coefficients and the variable x are accepted.
  static IntPolynomial parse(std::string_view text);

  unsigned degree() const noexcept { return static_cast<unsigned>(coefficients_.size() - 1); }
  const std::vector<BigInt>& coefficients() const noexcept { return coefficients_; }
  const BigInt& leading() const noexcept { return coefficients_.back(); }

  /// gcd of the coefficients (positive).
  BigInt content() const;

  BigInt operator()(const BigInt& n) const;

  /// Exact value at n when every intermediate fits in 128 bits.
  std::optional<__int128> evaluate_small(std::int64_t n) const;

  /// Coefficients reduced into [0, p), constant term first, trimmed (may be
  /// empty when p divides every coefficient).
  std::vector<std::uint64_t> reduce_mod(std::uint64_t p) const;

  std::string to_string() const;

  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) {
    return a.coefficients_ == b.coefficients_;
  }

 private:
  std::vector<BigInt> coefficients_;
  std::optional<std::vector<std::int64_t>> small_;  // coefficients when all fit int64
};

BigInt evaluate(const IntPolynomial& f, const BigInt& n);

/// Number of distinct residues l in [0, p) with f(l) = 0 mod p.
struct RootCount {
  std::uint64_t p;
  std::uint64_t omega;
  friend bool operator==(const RootCount&, const RootCount&) = default;
};

/// Exhaustive scan over residues; p must be prime (DomainError otherwise).
/// When p divides every coefficient the answer is p.
RootCount count_roots_bruteforce(const IntPolynomial& f, std::uint64_t p);

/// deg gcd(x^p - x, f mod p) over F_p. DomainError when p is not prime or
/// f vanishes identically mod p (use the brute-force path then).
RootCount count_roots_frobenius(const IntPolynomial& f, std::uint64_t p);

/// Primes at or below this use the exhaustive scan.
inline constexpr std::uint64_t kBruteForceRootLimit = 64;

/// Dispatches between the two methods above; total for every prime p.
RootCount count_roots(const IntPolynomial& f, std::uint64_t p);

/// Same dispatch on already reduced coefficients (constant term first).
std::uint64_t count_roots_mod_p(const std::vector<std::uint64_t>& reduced, std::uint64_t p);

/// True when f mod p (p prime, p not dividing the leading coefficient) is
/// irreducible over F_p. Rabin's test.
bool irreducible_mod_p(const IntPolynomial& f, std::uint64_t p);

struct IrreducibilityVerdict {
  enum class Kind { certified_irreducible, inconclusive, reducible };
  Kind kind = Kind::inconclusive;
  /// Prime p with f mod p irreducible (absent for degree-1 certificates).
  std::optional<std::uint64_t> witness_prime;
  /// Non-trivial factorization over Z when kind == reducible.
  std::vector<IntPolynomial> factors;
  /// The content was divided out before screening.
  bool content_removed = false;
};

std::string to_string(IrreducibilityVerdict::Kind kind);

/// Cheap screen: degree-1 certificate, rational-root splitting, then a
/// search for a prime p <= prime_budget, p not dividing the leading
/// coefficient, with f mod p irreducible.
IrreducibilityVerdict irreducibility_screen(const IntPolynomial& f, std::uint64_t prime_budget);

enum class Admissibility { unchecked, yes, no };

std::string to_string(Admissibility a);

/// Ordered, duplicate-free list of member polynomials f_1..f_k together
/// with the product f = f_1 ... f_k.
class PolynomialFamily {
 public:
  /// Throws ValidationError on an empty list or duplicate members.
  explicit PolynomialFamily(std::vector<IntPolynomial> members);

  /// Comma-separated member list, e.g. "x, x+2".
  static PolynomialFamily parse(std::string_view text);

  const std::vector<IntPolynomial>& members() const noexcept { return members_; }
  unsigned k() const noexcept { return static_cast<unsigned>(members_.size()); }
  const IntPolynomial& product() const noexcept { return product_; }

  /// deg f = sum of member degrees.
  unsigned product_degree() const noexcept { return product_.degree(); }
  /// Product of member degrees.
  std::uint64_t degree_product() const noexcept;

  bool all_linear() const noexcept;

  Admissibility admissibility() const noexcept { return admissibility_; }
  /// The prime p with omega_f(p) = p when admissibility() == no.
  std::optional<std::uint64_t> obstruction() const noexcept { return obstruction_; }
  /// Largest prime the admissibility scan examined.
  std::uint64_t scanned_bound() const noexcept { return scanned_bound_; }
  /// Why the finite scan suffices, filled in by check_admissibility.
  const std::string& admissibility_note() const noexcept { return note_; }

  /// omega_f(p) for the product polynomial.
  std::uint64_t omega(std::uint64_t p) const { return count_roots(product_, p).omega; }

  std::string to_string() const;

 private:
  friend PolynomialFamily check_admissibility(PolynomialFamily family);

  std::vector<IntPolynomial> members_;
  IntPolynomial product_;
  Admissibility admissibility_ = Admissibility::unchecked;
  std::optional<std::uint64_t> obstruction_;
  std::uint64_t scanned_bound_ = 0;
  std::string note_;
};

/// Scans every prime p <= max(deg f, largest prime factor of content(f))
/// and declares the family admissible iff omega_f(p) < p for all of them.
/// Larger primes cannot obstruct: f mod p is non-zero of degree <= deg f < p.
PolynomialFamily check_admissibility(PolynomialFamily family);

}  // namespace cgmodel
