#pragma once

namespace wcsense {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace wcsense
