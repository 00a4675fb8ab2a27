#pragma once

namespace mzphase {

inline constexpr const char* version = "0.1.0";

}  // namespace mzphase
