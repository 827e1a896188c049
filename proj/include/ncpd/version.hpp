#pragma once

#include <string_view>

namespace ncpd {

inline constexpr std::string_view version = "0.1.0";

}  // namespace ncpd
