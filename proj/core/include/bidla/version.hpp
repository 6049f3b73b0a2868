#pragma once

namespace bidla {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bidla
