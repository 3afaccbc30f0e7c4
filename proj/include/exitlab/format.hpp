#pragma once

#include <charconv>
#include <ostream>
#include <string>

namespace exitlab {

/// Shortest decimal text that parses back to exactly x.
inline std::string shortest(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::ostream& put(std::ostream& out, double x) { return out << shortest(x); }

}  // namespace exitlab
