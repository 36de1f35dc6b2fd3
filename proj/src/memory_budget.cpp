#include "cgmodel/memory_budget.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

#include "cgmodel/error.hpp"

namespace cgmodel {

std::uint64_t parse_byte_count(std::string_view text) {
  std::uint64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first) {
    throw ValidationError("invalid byte count '" + std::string(text) + "'");
  }
  std::uint64_t scale = 1;
  if (ptr != last) {
    switch (std::toupper(static_cast<unsigned char>(*ptr))) {
      case 'K': scale = std::uint64_t{1} << 10; break;
      case 'M': scale = std::uint64_t{1} << 20; break;
      case 'G': scale = std::uint64_t{1} << 30; break;
      default:
        throw ValidationError("invalid byte count suffix in '" + std::string(text) + "'");
    }
    if (ptr + 1 != last) {
      throw ValidationError("trailing characters in byte count '" + std::string(text) + "'");
    }
  }
  if (value > UINT64_MAX / scale) {
    throw ValidationError("byte count '" + std::string(text) + "' overflows");
  }
  return value * scale;
}

std::uint64_t memory_budget_bytes() {
  const char* env = std::getenv(std::string(kMemoryBudgetEnv).c_str());
  if (env == nullptr || *env == '\0') return kDefaultMemoryBudget;
  return parse_byte_count(env);
}

void require_within_budget(std::uint64_t bytes, std::string_view what) {
  const std::uint64_t budget = memory_budget_bytes();
  if (bytes > budget) {
    throw ResourceError(std::string(what) + " needs " + std::to_string(bytes) +
                        " bytes, exceeding the memory budget of " + std::to_string(budget) +
                        " bytes (override with " + std::string(kMemoryBudgetEnv) + ")");
  }
}

}  // namespace cgmodel
