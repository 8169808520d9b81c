#pragma once

namespace greedyrec {
inline constexpr const char* kVersion = "1.0.0";
}
