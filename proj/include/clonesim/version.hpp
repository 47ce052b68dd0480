#pragma once

namespace clonesim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace clonesim
