#pragma once

namespace jcgrav {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace jcgrav
