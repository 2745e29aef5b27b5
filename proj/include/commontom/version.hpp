#pragma once

namespace ctom {

inline constexpr const char* kToolName = "commontom";
inline constexpr const char* kToolVersion = "0.3.0";

}  // namespace ctom
