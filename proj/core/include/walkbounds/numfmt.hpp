#pragma once

#include <string>

namespace walkbounds {

/// 17 significant digits (round-trip safe); infinities print as "inf".
std::string format_g17(double v);

/// Fixed 10 decimals for human-facing tables; infinities print as "inf".
std::string format_f10(double v);

}  // namespace walkbounds
