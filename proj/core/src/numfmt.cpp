#include "walkbounds/numfmt.hpp"

#include <cmath>
#include <cstdio>

namespace walkbounds {

std::string format_g17(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_f10(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10f", v);
    return buf;
}

}  // namespace walkbounds
