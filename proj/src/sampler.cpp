#include "cgmodel/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "cgmodel/error.hpp"
#include "cgmodel/memory_budget.hpp"

namespace cgmodel {

void ModelParameters::validate() const {
  if (n_min < kMinimumSupport) {
    throw ValidationError("n_min must be at least " + std::to_string(kMinimumSupport) + ", got " +
                          std::to_string(n_min));
  }
}

double threshold_T(double x) {
  if (!(x >= 16)) throw DomainError("threshold T(x) needs x >= 16, got " + std::to_string(x));
  return std::log(x) / std::log(std::log(std::log(x)));
}

// ---------------------------------------------------------------------------
// Truncation schedule

namespace {

bool covers_prime(std::uint64_t n, std::uint32_t q) { return threshold_T(static_cast<double>(n)) >= q; }

}  // namespace

TruncationSchedule::TruncationSchedule() {
  for (std::uint32_t n = 2; n < 256; ++n) {
    bool prime = true;
    for (std::uint32_t d = 2; d * d <= n; ++d) prime = prime && n % d != 0;
    if (prime) primes_.push_back(n);
  }
  long double w = 1.0L;
  weights_.push_back(1.0);
  for (const std::uint32_t p : primes_) {
    w *= static_cast<long double>(p) / static_cast<long double>(p - 1);
    weights_.push_back(static_cast<double>(w));
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = kMinimumSupport; n <= 20000; ++n) {
    const double t = threshold_T(static_cast<double>(n));
    if (t < best) {
      best = t;
      turn_ = n;
    }
  }

  for (const std::uint32_t q : primes_) {
    // Falling branch [16, turn_]: predicate true then false.
    if (!covers_prime(kMinimumSupport, q)) {
      falling_.push_back(kMinimumSupport - 1);
    } else if (covers_prime(turn_, q)) {
      falling_.push_back(turn_);
    } else {
      std::uint64_t good = kMinimumSupport, bad = turn_;
      while (bad - good > 1) {
        const std::uint64_t mid = good + (bad - good) / 2;
        (covers_prime(mid, q) ? good : bad) = mid;
      }
      falling_.push_back(good);
    }
    // Rising branch [turn_, 2^64): predicate false then true.
    constexpr std::uint64_t top = std::numeric_limits<std::uint64_t>::max();
    if (covers_prime(turn_, q)) {
      rising_.push_back(turn_);
    } else if (covers_prime(top, q)) {
      std::uint64_t bad = turn_, good = top;
      while (good - bad > 1) {
        const std::uint64_t mid = bad + (good - bad) / 2;
        (covers_prime(mid, q) ? good : bad) = mid;
      }
      rising_.push_back(good);
    }
  }
}

const TruncationSchedule& TruncationSchedule::instance() {
  static const TruncationSchedule schedule;
  return schedule;
}

unsigned TruncationSchedule::prime_count(std::uint64_t n) const {
  unsigned r = 0;
  if (n <= turn_) {
    while (r < falling_.size() && falling_[r] >= n) ++r;
  } else {
    while (r < rising_.size() && rising_[r] <= n) ++r;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Probabilities and draws

namespace {

inline double probability(std::uint64_t n, std::uint64_t n_min, const TruncationSchedule& schedule) {
  if (n < n_min) return 0.0;
  const unsigned r = schedule.prime_count(n);
  const auto primes = schedule.primes();
  for (unsigned i = 0; i < r; ++i) {
    if (n % primes[i] == 0) return 0.0;
  }
  return std::min(1.0, schedule.weight(r) / std::log(static_cast<double>(n)));
}

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double membership_probability(std::uint64_t n, const ModelParameters& params) {
  if (n < 2) throw DomainError("membership probability is defined for n >= 2");
  params.validate();
  return probability(n, params.n_min, TruncationSchedule::instance());
}

std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t n) noexcept {
  const std::uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL);
  return mix64(key ^ mix64(n + 0xd1b54a32d192ed03ULL));
}

double draw_uniform(std::uint64_t seed, std::uint64_t n) noexcept {
  return static_cast<double>(draw_bits(seed, n) >> 11) * 0x1.0p-53;
}

bool draw_member(std::uint64_t n, const ModelParameters& params) {
  const double prob = membership_probability(n, params);
  return prob > 0.0 && draw_uniform(params.seed, n) < prob;
}

// ---------------------------------------------------------------------------
// SampledSet

SampledSet::SampledSet(ModelParameters params, std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t> words)
    : params_(params), lo_(lo), hi_(hi), words_(std::move(words)) {
  if (lo > hi) throw DomainError("sampled range needs lo <= hi");
  if (words_.size() != (hi - lo) / 64 + 1) throw ValidationError("bitset length does not match the range");
}

std::uint64_t SampledSet::count(std::uint64_t a, std::uint64_t b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (a > b) return 0;
  const std::uint64_t first = a - lo_, last = b - lo_;
  std::uint64_t total = 0;
  for (std::uint64_t w = first / 64; w <= last / 64; ++w) {
    std::uint64_t bits = words_[w];
    if (w == first / 64) bits &= ~std::uint64_t{0} << (first % 64);
    if (w == last / 64 && last % 64 != 63) bits &= (std::uint64_t{1} << (last % 64 + 1)) - 1;
    total += std::popcount(bits);
  }
  return total;
}

std::vector<std::uint64_t> SampledSet::members() const {
  std::vector<std::uint64_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(lo_ + 64 * w + static_cast<unsigned>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

constexpr std::uint64_t kExpectationChunk = 1 << 16;

std::vector<std::uint64_t> allocate_words(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params) {
  params.validate();
  if (lo < 2 || lo > hi) {
    throw DomainError("sample range needs 2 <= lo <= hi, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const std::uint64_t words = (hi - lo) / 64 + 1;
  require_within_budget(8 * words, "sample bitset over [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return std::vector<std::uint64_t>(words, 0);
}

inline std::uint64_t fill_word(std::uint64_t w, std::uint64_t lo, std::uint64_t hi, const ModelParameters& params,
                               const TruncationSchedule& schedule) {
  std::uint64_t bits = 0;
  const std::uint64_t base = lo + 64 * w;
  const std::uint64_t count = std::min<std::uint64_t>(64, hi - base + 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t n = base + i;
    const double prob = probability(n, params.n_min, schedule);
    if (prob > 0.0 && draw_uniform(params.seed, n) < prob) bits |= std::uint64_t{1} << i;
  }
  return bits;
}

long double chunk_sum(std::uint64_t a, std::uint64_t b, std::uint64_t n_min, const TruncationSchedule& schedule) {
  long double s = 0.0L;
  for (std::uint64_t n = a;; ++n) {
    s += probability(n, n_min, schedule);
    if (n == b) break;
  }
  return s;
}

}  // namespace

namespace serial {

SampledSet sample_range(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params) {
  auto words = allocate_words(lo, hi, params);
  const auto& schedule = TruncationSchedule::instance();
  for (std::uint64_t w = 0; w < words.size(); ++w) words[w] = fill_word(w, lo, hi, params, schedule);
  return SampledSet(params, lo, hi, std::move(words));
}

long double expected_count(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params) {
  params.validate();
  lo = std::max<std::uint64_t>(lo, 2);
  if (lo > hi) return 0.0L;
  return chunk_sum(lo, hi, params.n_min, TruncationSchedule::instance());
}

}  // namespace serial

SampledSet sample_range(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params) {
  auto words = allocate_words(lo, hi, params);
  const auto& schedule = TruncationSchedule::instance();
  const auto count = static_cast<std::int64_t>(words.size());
#pragma omp parallel for schedule(static, 256)
  for (std::int64_t w = 0; w < count; ++w) {
    words[static_cast<std::size_t>(w)] = fill_word(static_cast<std::uint64_t>(w), lo, hi, params, schedule);
  }
  return SampledSet(params, lo, hi, std::move(words));
}

long double expected_count(std::uint64_t lo, std::uint64_t hi, const ModelParameters& params) {
  params.validate();
  lo = std::max<std::uint64_t>(lo, 2);
  if (lo > hi) return 0.0L;
  const auto& schedule = TruncationSchedule::instance();
  const std::uint64_t chunks = (hi - lo) / kExpectationChunk + 1;
  std::vector<long double> partial(chunks);
  const auto total = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < total; ++c) {
    const std::uint64_t a = lo + static_cast<std::uint64_t>(c) * kExpectationChunk;
    const std::uint64_t b = std::min(hi, a + (kExpectationChunk - 1));
    partial[static_cast<std::size_t>(c)] = chunk_sum(a, b, params.n_min, schedule);
  }
  long double sum = 0.0L;
  for (const long double v : partial) sum += v;
  return sum;
}

}  // namespace cgmodel
