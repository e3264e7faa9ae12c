#pragma once

namespace sofic {

inline constexpr const char* kVersion = "0.1.0";

}
