#pragma once

namespace kfield {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kfield
