#include "chaostune/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "chaostune/error.hpp"

namespace chaostune {

std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view field) {
    const auto f = trim(field);
    if (f == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (f == "inf") return std::numeric_limits<double>::infinity();
    if (f == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto* first = f.data();
    if (!f.empty() && f.front() == '+') ++first;
    const auto res = std::from_chars(first, f.data() + f.size(), value);
    if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw Error(ErrorCode::ParseFailure, "not a number: '" + std::string(f) + "'");
    }
    return value;
}

long long parse_int(std::string_view field) {
    const auto f = trim(field);
    long long value = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
    if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw Error(ErrorCode::ParseFailure, "not an integer: '" + std::string(f) + "'");
    }
    return value;
}

}  // namespace chaostune
