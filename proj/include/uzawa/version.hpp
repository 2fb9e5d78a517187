#pragma once

namespace uzawa {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace uzawa
