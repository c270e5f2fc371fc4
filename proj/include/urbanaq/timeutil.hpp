#pragma once

// Locale-independent text helpers for timestamps and decimals.

#include <optional>
#include <string>
#include <string_view>

#include "urbanaq/domain.hpp"

namespace urbanaq {

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text) noexcept;
/// "YYYY-MM-DD" of the UTC day containing t.
std::string format_day(Timestamp t);

inline constexpr Timestamp kSecondsPerDay = 86'400;

/// Shortest decimal that parses back to exactly `v` ('.' separator, no locale).
std::string format_decimal(double v);
std::optional<double> parse_decimal(std::string_view text) noexcept;

/// Round to `digits` significant decimal digits.
double round_significant(double v, int digits);

}  // namespace urbanaq
