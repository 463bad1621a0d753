#pragma once

namespace psrsel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace psrsel
