#pragma once

namespace minplan {

inline constexpr const char* kToolName = "minplan";
inline constexpr const char* kToolVersion = "0.1.0";

// Single version line embedded in every artifact's reproducibility header.
inline constexpr const char* kVersionLine = "minplan 0.1.0";

}  // namespace minplan
