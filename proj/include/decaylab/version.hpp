#pragma once

namespace decaylab {

inline constexpr const char* project_version = "0.1.0";

} // namespace decaylab
