#pragma once

namespace convexcorr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace convexcorr
