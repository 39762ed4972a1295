#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nodebias {

// Shortest decimal representation that round-trips the exact double.
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    // Tolerate surrounding spaces, nothing else.
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    if (b == e) return std::nullopt;
    double out = 0.0;
    auto res = std::from_chars(s.data() + b, s.data() + e, out);
    if (res.ec != std::errc() || res.ptr != s.data() + e) return std::nullopt;
    return out;
}

// Runs fn(0..count) across a small thread pool. Each index owns its output
// slot, so scheduling order cannot affect results.
void parallel_for(size_t count, const std::function<void(size_t)>& fn);

} // namespace nodebias
