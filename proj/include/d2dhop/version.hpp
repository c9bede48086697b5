#pragma once

namespace d2dhop {
inline constexpr const char* kVersion = "0.1.0";
}
