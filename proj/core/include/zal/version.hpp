#pragma once

namespace zal {

inline constexpr const char* version() { return "0.1.0"; }

} // namespace zal
