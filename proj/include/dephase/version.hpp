// dephase/version.hpp — library name and version constants
#pragma once

namespace dephase {

inline constexpr const char* kEngineName    = "dephase";
inline constexpr const char* kEngineVersion = "0.1.0";

} // namespace dephase
