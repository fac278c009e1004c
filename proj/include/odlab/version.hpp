#pragma once

namespace odlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace odlab
