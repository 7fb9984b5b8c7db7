#pragma once

namespace sekf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sekf
