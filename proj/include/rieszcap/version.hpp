#pragma once

namespace rieszcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rieszcap
