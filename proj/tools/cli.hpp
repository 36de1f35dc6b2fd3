#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cgmodel::cli {

/// Process exit codes. Stable: scripts depend on them.
enum ExitCode : int { kSuccess = 0, kUsage = 1, kValidation = 2, kResource = 3 };

/// Runs the command line. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Non-negative integer in plain, scientific ("1e6") or power ("2^20")
/// notation; the value must be integral. ValidationError otherwise.
std::uint64_t parse_count(std::string_view text);

/// Positive real in the same notations.
double parse_real(std::string_view text);

/// "lo:hi" with both ends in parse_count notation.
std::pair<std::uint64_t, std::uint64_t> parse_range(std::string_view text);

/// Comma-separated seeds.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// key = value lines, '#' comments, blank lines ignored. Keys are given
/// without the leading dashes. ValidationError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

}  // namespace cgmodel::cli
