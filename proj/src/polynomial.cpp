#include "cgmodel/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <cctype>
#include <limits>
#include <map>
#include <set>

#include "cgmodel/error.hpp"
#include "fp_poly.hpp"

namespace cgmodel {

namespace {

void trim_big(std::vector<BigInt>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

std::uint64_t mod_small(const BigInt& value, std::uint64_t p) {
  BigInt r = value % p;
  if (r < 0) r += p;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t mod_small(std::int64_t value, std::uint64_t p) {
  const auto mag = static_cast<std::uint64_t>(value < 0 ? -(value + 1) : value) + (value < 0 ? 1 : 0);
  const std::uint64_t r = mag % p;
  return value < 0 && r != 0 ? p - r : r;
}

void require_prime(std::uint64_t p, const char* where) {
  if (!is_prime_u64(p)) {
    throw DomainError(std::string(where) + ": modulus " + std::to_string(p) + " is not prime");
  }
  if (p >= (std::uint64_t{1} << 63)) {
    throw DomainError(std::string(where) + ": modulus " + std::to_string(p) + " exceeds 2^63");
  }
}

std::string big_to_string(const BigInt& v) { return v.str(); }

bool fits_u64(const BigInt& v) { return v >= 0 && v <= std::numeric_limits<std::uint64_t>::max(); }

std::vector<std::uint64_t> divisors_of(std::uint64_t n) {
  std::vector<std::uint64_t> divs{1};
  for (const auto& [p, e] : factorize(n)) {
    const std::size_t base = divs.size();
    std::uint64_t power = 1;
    for (unsigned i = 0; i < e; ++i) {
      power *= p;
      for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * power);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

// ---------------------------------------------------------------------------
// Parsing

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  std::vector<BigInt> parse() {
    std::map<unsigned, BigInt> terms;
    skip_space();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_space();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      auto [coef, power] = term();
      terms[power] += sign * coef;
      skip_space();
    }
    const unsigned top = terms.rbegin()->first;
    std::vector<BigInt> coefficients(top + 1, 0);
    for (const auto& [power, coef] : terms) coefficients[power] = coef;
    return coefficients;
  }

 private:
  std::pair<BigInt, unsigned> term() {
    BigInt coef = 1;
    bool have_coef = false;
    if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      coef = digits();
      have_coef = true;
      skip_space();
      if (!at_end() && (peek() == '.' || peek() == '/' || peek() == 'e' || peek() == 'E')) {
        fail("non-integer coefficient");
      }
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip_space();
        if (at_end() || peek() != 'x') fail("expected 'x' after '*'");
      }
    }
    if (!at_end() && peek() == 'x') {
      ++pos_;
      skip_space();
      unsigned power = 1;
      if (!at_end() && peek() == '^') {
        ++pos_;
        skip_space();
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
        const BigInt e = digits();
        if (e > 4096) fail("exponent too large");
        power = static_cast<unsigned>(e);
      }
      return {coef, power};
    }
    if (!have_coef) fail("expected a coefficient or 'x'");
    return {coef, 0};
  }

  BigInt digits() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    return BigInt(std::string(text_.substr(start, pos_ - start)));
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& why) const {
    std::string token = at_end() ? std::string("<end>") : std::string(1, text_[pos_]);
    throw ValidationError("cannot parse polynomial '" + std::string(text_) + "': " + why + " at position " +
                          std::to_string(pos_) + " (token " + token + ")");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

BigInt content_of(const std::vector<BigInt>& c) {
  BigInt g = 0;
  for (const auto& v : c) g = boost::multiprecision::gcd(g, abs(v));
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// IntPolynomial

IntPolynomial::IntPolynomial(std::vector<BigInt> coefficients) : coefficients_(std::move(coefficients)) {
  trim_big(coefficients_);
  if (coefficients_.size() < 2) throw ValidationError("polynomial must have degree >= 1");
  if (coefficients_.back() <= 0) {
    throw ValidationError("polynomial " + to_string() + " must have a positive leading coefficient");
  }
  std::vector<std::int64_t> small;
  small.reserve(coefficients_.size());
  for (const auto& c : coefficients_) {
    if (c > std::numeric_limits<std::int64_t>::max() || c < std::numeric_limits<std::int64_t>::min()) return;
    small.push_back(static_cast<std::int64_t>(c));
  }
  small_ = std::move(small);
}

IntPolynomial IntPolynomial::parse(std::string_view text) { return IntPolynomial(PolyParser(text).parse()); }

BigInt IntPolynomial::content() const { return content_of(coefficients_); }

BigInt IntPolynomial::operator()(const BigInt& n) const {
  BigInt acc = 0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * n + *it;
  return acc;
}

BigInt evaluate(const IntPolynomial& f, const BigInt& n) { return f(n); }

std::optional<__int128> IntPolynomial::evaluate_small(std::int64_t n) const {
  if (!small_) return std::nullopt;
  __int128 acc = 0;
  for (auto it = small_->rbegin(); it != small_->rend(); ++it) {
    __int128 scaled;
    if (__builtin_mul_overflow(acc, static_cast<__int128>(n), &scaled)) return std::nullopt;
    if (__builtin_add_overflow(scaled, static_cast<__int128>(*it), &acc)) return std::nullopt;
  }
  return acc;
}

std::vector<std::uint64_t> IntPolynomial::reduce_mod(std::uint64_t p) const {
  std::vector<std::uint64_t> out(coefficients_.size());
  if (small_) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mod_small((*small_)[i], p);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mod_small(coefficients_[i], p);
  }
  fp::trim(out);
  return out;
}

std::string IntPolynomial::to_string() const {
  std::string out;
  for (std::size_t i = coefficients_.size(); i-- > 0;) {
    const BigInt& c = coefficients_[i];
    if (c == 0) continue;
    const BigInt mag = abs(c);
    if (c < 0) out += "-";
    else if (!out.empty()) out += "+";
    const bool unit = mag == 1;
    if (i == 0 || !unit) out += big_to_string(mag);
    if (i >= 1) out += "x";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> out(a.coefficients_.size() + b.coefficients_.size() - 1, 0);
  for (std::size_t i = 0; i < a.coefficients_.size(); ++i) {
    for (std::size_t j = 0; j < b.coefficients_.size(); ++j) out[i + j] += a.coefficients_[i] * b.coefficients_[j];
  }
  return IntPolynomial(std::move(out));
}

// ---------------------------------------------------------------------------
// Root counting

namespace {

std::uint64_t bruteforce_reduced(const std::vector<std::uint64_t>& c, std::uint64_t p) {
  if (c.empty()) return p;
  std::uint64_t roots = 0;
  if (p < (std::uint64_t{1} << 32)) {
    for (std::uint64_t l = 0; l < p; ++l) {
      std::uint64_t acc = 0;
      for (std::size_t i = c.size(); i-- > 0;) acc = (acc * l + c[i]) % p;
      roots += acc == 0;
    }
  } else {
    for (std::uint64_t l = 0; l < p; ++l) {
      std::uint64_t acc = 0;
      for (std::size_t i = c.size(); i-- > 0;) acc = (mul_mod(acc, l, p) + c[i]) % p;
      roots += acc == 0;
    }
  }
  return roots;
}

std::uint64_t frobenius_reduced(const std::vector<std::uint64_t>& c, std::uint64_t p) {
  if (c.size() == 1) return 0;  // non-zero constant
  const fp::Poly g = fp::monic(c, p);
  fp::Poly h = fp::pow_mod_poly(fp::Poly{0, 1}, p, g, p);
  h = fp::sub(std::move(h), fp::rem(fp::Poly{0, 1}, g, p), p);
  const fp::Poly d = fp::gcd(g, h, p);
  return static_cast<std::uint64_t>(fp::degree(d));
}

}  // namespace

RootCount count_roots_bruteforce(const IntPolynomial& f, std::uint64_t p) {
  require_prime(p, "count_roots_bruteforce");
  return {p, bruteforce_reduced(f.reduce_mod(p), p)};
}

RootCount count_roots_frobenius(const IntPolynomial& f, std::uint64_t p) {
  require_prime(p, "count_roots_frobenius");
  const auto c = f.reduce_mod(p);
  if (c.empty()) {
    throw DomainError("count_roots_frobenius: " + f.to_string() + " vanishes identically mod " + std::to_string(p) +
                      "; use the brute-force count");
  }
  return {p, frobenius_reduced(c, p)};
}

std::uint64_t count_roots_mod_p(const std::vector<std::uint64_t>& reduced, std::uint64_t p) {
  if (p <= kBruteForceRootLimit || reduced.empty()) return bruteforce_reduced(reduced, p);
  return frobenius_reduced(reduced, p);
}

RootCount count_roots(const IntPolynomial& f, std::uint64_t p) {
  require_prime(p, "count_roots");
  return {p, count_roots_mod_p(f.reduce_mod(p), p)};
}

bool irreducible_mod_p(const IntPolynomial& f, std::uint64_t p) {
  require_prime(p, "irreducible_mod_p");
  const auto c = f.reduce_mod(p);
  if (fp::degree(c) != static_cast<int>(f.degree())) {
    throw DomainError("irreducible_mod_p: " + std::to_string(p) + " divides the leading coefficient");
  }
  const unsigned d = f.degree();
  if (d == 1) return true;
  const fp::Poly g = fp::monic(c, p);
  const fp::Poly x = fp::rem(fp::Poly{0, 1}, g, p);

  // powers[i] = x^(p^i) mod g
  std::vector<fp::Poly> powers{x};
  for (unsigned i = 1; i <= d; ++i) powers.push_back(fp::pow_mod_poly(powers.back(), p, g, p));
  if (powers[d] != x) return false;
  for (const auto& [q, e] : factorize(d)) {
    (void)e;
    const fp::Poly diff = fp::sub(powers[d / q], x, p);
    if (fp::degree(fp::gcd(g, diff, p)) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Irreducibility screen

std::string to_string(IrreducibilityVerdict::Kind kind) {
  switch (kind) {
    case IrreducibilityVerdict::Kind::certified_irreducible: return "certified_irreducible";
    case IrreducibilityVerdict::Kind::inconclusive: return "inconclusive";
    case IrreducibilityVerdict::Kind::reducible: return "reducible";
  }
  return "unknown";
}

namespace {

// Divides f by (e*x - s*d) exactly; caller guarantees s*d/e is a root.
std::vector<BigInt> divide_linear(const std::vector<BigInt>& f, const BigInt& e, const BigInt& sd) {
  // Synthetic division by (e x - sd) over Z, valid because the quotient is integral.
  const std::size_t n = f.size() - 1;
  std::vector<BigInt> q(n);
  BigInt carry = 0;
  for (std::size_t i = n; i-- > 0;) {
    const BigInt numerator = f[i + 1] + carry;
    q[i] = numerator / e;
    carry = q[i] * sd;
  }
  return q;
}

struct RationalRootResult {
  bool complete = false;  // every candidate was tried
  std::optional<std::pair<std::vector<BigInt>, std::vector<BigInt>>> split;
};

RationalRootResult rational_root_split(const std::vector<BigInt>& f) {
  RationalRootResult result;
  const BigInt a0 = abs(f.front());
  const BigInt& lead = f.back();
  if (a0 == 0) {
    std::vector<BigInt> q(f.begin() + 1, f.end());
    result.complete = true;
    result.split = std::make_pair(std::vector<BigInt>{0, 1}, q);
    return result;
  }
  if (!fits_u64(a0) || !fits_u64(lead)) return result;
  const auto num_divs = divisors_of(static_cast<std::uint64_t>(a0));
  const auto den_divs = divisors_of(static_cast<std::uint64_t>(lead));
  if (num_divs.size() * den_divs.size() > 200000) return result;
  const std::size_t n = f.size() - 1;
  for (const std::uint64_t e : den_divs) {
    for (const std::uint64_t d : num_divs) {
      if (std::gcd(d, e) != 1) continue;
      for (const int s : {1, -1}) {
        const BigInt num = BigInt(d) * s;
        const BigInt den = e;
        // e^n f(num/den) = sum a_j num^j den^(n-j)
        BigInt acc = 0, num_pow = 1;
        std::vector<BigInt> den_pow(n + 1, 1);
        for (std::size_t j = 1; j <= n; ++j) den_pow[j] = den_pow[j - 1] * den;
        for (std::size_t j = 0; j <= n; ++j) {
          acc += f[j] * num_pow * den_pow[n - j];
          num_pow *= num;
        }
        if (acc == 0) {
          result.complete = true;
          result.split = std::make_pair(std::vector<BigInt>{-num, den}, divide_linear(f, den, num));
          return result;
        }
      }
    }
  }
  result.complete = true;
  return result;
}

}  // namespace

IrreducibilityVerdict irreducibility_screen(const IntPolynomial& input, std::uint64_t prime_budget) {
  IrreducibilityVerdict verdict;
  std::vector<BigInt> coefficients = input.coefficients();
  const BigInt c = input.content();
  if (c > 1) {
    for (auto& v : coefficients) v /= c;
    verdict.content_removed = true;
  }
  const IntPolynomial f(coefficients);
  if (f.degree() == 1) {
    verdict.kind = IrreducibilityVerdict::Kind::certified_irreducible;
    return verdict;
  }
  const auto roots = rational_root_split(f.coefficients());
  if (roots.split) {
    verdict.kind = IrreducibilityVerdict::Kind::reducible;
    verdict.factors.emplace_back(roots.split->first);
    verdict.factors.emplace_back(roots.split->second);
    return verdict;
  }
  if (prime_budget >= 2) {
    const PrimeTable table(prime_budget);
    std::optional<std::uint64_t> witness;
    table.for_each_prime(2, prime_budget, [&](std::uint64_t p) {
      if (witness || mod_small(f.leading(), p) == 0) return;
      if (irreducible_mod_p(f, p)) witness = p;
    });
    if (witness) {
      verdict.kind = IrreducibilityVerdict::Kind::certified_irreducible;
      verdict.witness_prime = witness;
      return verdict;
    }
  }
  // A primitive cubic or quadratic without rational roots has no factor of degree 1.
  if (roots.complete && f.degree() <= 3) {
    verdict.kind = IrreducibilityVerdict::Kind::certified_irreducible;
    return verdict;
  }
  verdict.kind = IrreducibilityVerdict::Kind::inconclusive;
  return verdict;
}

// ---------------------------------------------------------------------------
// Families

std::string to_string(Admissibility a) {
  switch (a) {
    case Admissibility::unchecked: return "unchecked";
    case Admissibility::yes: return "yes";
    case Admissibility::no: return "no";
  }
  return "unknown";
}

namespace {

IntPolynomial multiply_all(const std::vector<IntPolynomial>& members) {
  if (members.empty()) throw ValidationError("polynomial family must have at least one member");
  IntPolynomial product = members.front();
  for (std::size_t i = 1; i < members.size(); ++i) product = product * members[i];
  return product;
}

}  // namespace

PolynomialFamily::PolynomialFamily(std::vector<IntPolynomial> members)
    : members_(std::move(members)), product_(multiply_all(members_)) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    for (std::size_t j = i + 1; j < members_.size(); ++j) {
      if (members_[i] == members_[j]) {
        throw ValidationError("duplicate family member " + members_[i].to_string());
      }
    }
  }
}

PolynomialFamily PolynomialFamily::parse(std::string_view text) {
  std::vector<IntPolynomial> members;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    members.push_back(IntPolynomial::parse(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return PolynomialFamily(std::move(members));
}

std::uint64_t PolynomialFamily::degree_product() const noexcept {
  std::uint64_t d = 1;
  for (const auto& m : members_) d *= m.degree();
  return d;
}

bool PolynomialFamily::all_linear() const noexcept {
  return std::all_of(members_.begin(), members_.end(), [](const IntPolynomial& m) { return m.degree() == 1; });
}

std::string PolynomialFamily::to_string() const {
  std::string out;
  for (const auto& m : members_) {
    if (!out.empty()) out += ",";
    out += m.to_string();
  }
  return out;
}

PolynomialFamily check_admissibility(PolynomialFamily family) {
  const BigInt content = family.product_.content();
  std::uint64_t bound = family.product_degree();
  if (content > 1) {
    if (!fits_u64(content)) {
      throw ValidationError("content of " + family.to_string() + " exceeds 64 bits; divide it out first");
    }
    for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(content))) {
      (void)e;
      bound = std::max(bound, p);
    }
  }
  family.admissibility_ = Admissibility::yes;
  family.obstruction_.reset();
  family.scanned_bound_ = bound;
  if (bound >= 2) {
    const PrimeTable table(std::max<std::uint64_t>(bound, 2));
    table.for_each_prime(2, bound, [&](std::uint64_t p) {
      if (family.obstruction_) return;
      if (count_roots(family.product_, p).omega == p) {
        family.admissibility_ = Admissibility::no;
        family.obstruction_ = p;
      }
    });
  }
  family.note_ = "omega_f(p) < p verified for every prime p <= " + std::to_string(bound) +
                 "; every larger prime leaves f mod p non-zero of degree <= deg f = " +
                 std::to_string(family.product_degree()) + " < p, so it has fewer than p roots";
  if (family.admissibility_ == Admissibility::no) {
    family.note_ = "omega_f(" + std::to_string(*family.obstruction_) + ") = " +
                   std::to_string(*family.obstruction_) + ": every value of f is divisible by " +
                   std::to_string(*family.obstruction_);
  }
  return family;
}

}  // namespace cgmodel
