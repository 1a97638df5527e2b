#pragma once

#include <cstdio>
#include <string>

namespace stemvine::detail {

// Shortest round-trippable decimal form; keeps serialized files and reports
// bit-stable across runs.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace stemvine::detail
