#pragma once

namespace sat {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kEngineName = "sat";

} // namespace sat
