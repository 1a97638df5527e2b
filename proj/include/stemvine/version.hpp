#pragma once

#include <string_view>

namespace stemvine {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace stemvine
