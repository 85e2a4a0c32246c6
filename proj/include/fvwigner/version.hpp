#pragma once

namespace fvw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fvw
