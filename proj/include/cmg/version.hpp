#pragma once

namespace cmg {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace cmg
