#pragma once

namespace patrol {
inline constexpr const char* kVersion = "0.1.0";
}
