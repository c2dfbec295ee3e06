#pragma once

namespace averop {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace averop
