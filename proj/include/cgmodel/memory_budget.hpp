#pragma once

#include <cstdint>
#include <string_view>

namespace cgmodel {

/// Environment variable that overrides the default budget. Accepts a byte
/// count with an optional K, M or G suffix (powers of 1024).
inline constexpr std::string_view kMemoryBudgetEnv = "CGMODEL_MEMORY_BUDGET";
inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{1} << 30;

std::uint64_t memory_budget_bytes();

/// Parses "4096", "512M", "2G"; throws ValidationError on junk.
std::uint64_t parse_byte_count(std::string_view text);

/// Throws ResourceError naming the budget when `bytes` exceeds it.
void require_within_budget(std::uint64_t bytes, std::string_view what);

}  // namespace cgmodel
