#pragma once

#include <string_view>

namespace gspsim {

inline constexpr std::string_view kToolName = "gspsim";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace gspsim
