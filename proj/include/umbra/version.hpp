#pragma once

namespace umbra {

inline constexpr const char* kToolName = "umbra";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace umbra
