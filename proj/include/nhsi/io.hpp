#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>

namespace nhsi {

/// Round-trippable decimal form ("%.17g"); -0 is written as 0 so that
/// outputs do not depend on the sign of a zero.
inline std::string format_double(double x) {
    if (x == 0.0) x = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Writes comma-separated fields followed by a newline.
template <class... Fields>
void write_csv_row(std::ostream& os, const Fields&... fields) {
    bool first = true;
    auto put = [&](const auto& f) {
        if (!first) os << ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(f)>>) os << format_double(f);
        else os << f;
    };
    (put(fields), ...);
    os << '\n';
}

} // namespace nhsi
