#pragma once

namespace gaussnet {
inline constexpr const char* kVersion = "0.1.0";
}
