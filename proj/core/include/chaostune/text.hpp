#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chaostune {

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;
[[nodiscard]] std::vector<std::string_view> split(std::string_view s, char sep);

/// Shortest decimal string that parses back to exactly `value`
/// ("nan", "inf", "-inf" for non-finite values).
[[nodiscard]] std::string format_double(double value);

/// Strict parse of the whole field; throws ParseFailure.
[[nodiscard]] double parse_double(std::string_view field);
[[nodiscard]] long long parse_int(std::string_view field);

}  // namespace chaostune
