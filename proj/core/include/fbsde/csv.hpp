#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fbsde::csv {

// Fixed "%.12g" formatting keeps files byte-stable across reruns of the same build.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::ofstream open(const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("csv: cannot open " + path + " for writing");
    return os;
}

} // namespace fbsde::csv
