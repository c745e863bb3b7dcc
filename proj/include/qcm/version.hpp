#pragma once

#include <string_view>

namespace qcm {

inline constexpr std::string_view kLibraryVersion = "1.0.0";

}  // namespace qcm
