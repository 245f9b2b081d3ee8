#pragma once

namespace rocc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rocc
