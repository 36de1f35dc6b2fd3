#pragma once

// The random-set measure: n >= n_min joins independently with probability
//   min(1, prod_{p <= T(n)} (1-1/p)^-1 / log n)   if n is coprime to every p <= T(n),
//   0                                            otherwise,
// with T(n) = log n / log log log n.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cgmodel {

inline constexpr std::uint64_t kMinimumSupport = 16;

struct ModelParameters {
  std::uint64_t seed = 0;
  /// Probability is 0 below n_min. Must be >= 16 so that log log log n > 0.
  std::uint64_t n_min = kMinimumSupport;

  /// Throws ValidationError when n_min < 16.
  void validate() const;
};

/// log x / log log log x; DomainError for x < 16.
double threshold_T(double x);

/// Precomputed breakpoints of n -> #{p <= T(n)}.
///
/// T(n) decreases from T(16) ~ 141.6 to a minimum ~ 10.28 near n ~ 340 and
/// increases afterwards, so {n : T(n) >= q} is [16, falling(q)] union
/// [rising(q), inf). Breakpoints are located by bisection on the same
/// floating-point threshold_T used everywhere else.
class TruncationSchedule {
 public:
  static const TruncationSchedule& instance();

  /// Number of primes p <= T(n), n >= 16.
  unsigned prime_count(std::uint64_t n) const;

  /// The primes covered by the schedule (all primes below 256; enough for
  /// every 64-bit n >= 16).
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }

  /// prod_{i < r} (1 - 1/p_i)^-1.
  double weight(unsigned r) const { return weights_[r]; }

  std::uint64_t turning_point() const noexcept { return turn_; }

 private:
  TruncationSchedule();

  std::vector<std::uint32_t> primes_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> falling_;  // last n <= turn_ with T(n) >= p_j, or 15 if none
  std::vector<std::uint64_t> rising_;   // first n >= turn_ with T(n) >= p_j, or UINT64_MAX if none
  std::uint64_t turn_ = 0;
};

double membership_probability(std::uint64_t n, const ModelParameters& params);

/// The counter-based draw: a keyed 64-bit mix of (seed, n), a pure function.
std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t n) noexcept;
/// Top 53 bits of draw_bits scaled to [0, 1).
double draw_uniform(std::uint64_t seed, std::uint64_t n) noexcept;
/// Membership of a single n in the realization with the given parameters.
bool draw_member(std::uint64_t n, const ModelParameters& params);

/// One realization restricted to [lo, hi].
class SampledSet {
 public:
  SampledSet(ModelParameters params, std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t> words);

  const ModelParameters& parameters() const noexcept { return params_; }
  std::uint64_t lo() const noexcept { return lo_; }
  std::uint64_t hi() const noexcept { return hi_; }
  bool covers(std::uint64_t a, std::uint64_t b) const noexcept { return lo_ <= a && b <= hi_; }

  /// False outside [lo, hi].
  bool contains(std::uint64_t n) const noexcept {
    if (n < lo_ || n > hi_) return false;
    const std::uint64_t i = n - lo_;
    return (words_[i / 64] >> (i % 64)) & 1U;
  }

  /// Members in [a, b] (clipped to the range).
  std::uint64_t count(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t count() const { return count(lo_, hi_); }

  std::vector<std::uint64_t> members() const;

  /// Bit i of word w is the membership of lo + 64 w + i.
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const SampledSet& a, const SampledSet& b) {
    return a.params_.seed == b.params_.seed && a.params_.n_min == b.params_.n_min && a.lo_ == b.lo_ &&
           a.hi_ == b.hi_ && a.words_ == b.words_;
  }

 private:
  ModelParameters params_;
  std::uint64_t lo_;
  std::uint64_t hi_;
  std::vector<std::uint64_t> words_;
};

/// OpenMP over 64-bit words; bit-identical for every thread count.
/// Requires 2 <= lo <= hi; ResourceError past the memory budget.
SampledSet sample_range(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params);

/// Exact sum of membership probabilities over [lo, hi] (0 when lo > hi).
/// Summed in fixed chunks reduced in order, so thread count does not matter.
long double expected_count(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params);

namespace serial {
SampledSet sample_range(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params);
/// Plain left-to-right sum.
long double expected_count(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params);
}  // namespace serial

}  // namespace cgmodel
