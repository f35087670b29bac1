#pragma once

namespace polyrep {
inline constexpr const char* kVersion = "0.1.0";
}
