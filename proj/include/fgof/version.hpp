#pragma once

namespace fgof {
inline constexpr const char* kVersion = "0.1.0";
}
