#pragma once

namespace crossmi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crossmi
