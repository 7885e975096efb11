#pragma once

namespace fracsign {

inline constexpr const char* kVersion = "1.0.0";

} // namespace fracsign
