#pragma once

namespace agmcs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace agmcs
