#pragma once

#include <string_view>

namespace cgmodel {

inline constexpr std::string_view kLibraryVersion = "0.1.0";
inline constexpr int kReportFormatVersion = 1;

}  // namespace cgmodel
