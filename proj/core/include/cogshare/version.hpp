#pragma once

namespace cogshare {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace cogshare
