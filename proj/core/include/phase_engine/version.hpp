#pragma once

namespace phase_engine {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace phase_engine
