#pragma once

namespace acasimir {

inline constexpr const char* tool_name = "acasimir";
inline constexpr const char* tool_version = "1.0.0";

// vacuum permittivity, F/m (CODATA 2018)
inline constexpr double epsilon0 = 8.8541878128e-12;

}  // namespace acasimir
