#include "urbanaq/timeutil.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace urbanaq {

namespace {

Timestamp floor_div(Timestamp a, Timestamp b) noexcept {
    Timestamp q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool parse_int(std::string_view s, int& out) noexcept {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    const Timestamp days = floor_div(t, kSecondsPerDay);
    const Timestamp secs = t - days * kSecondsPerDay;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long long>(secs / 3600),
                  static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
    return buf.data();
}

std::string format_day(Timestamp t) { return format_iso8601(t).substr(0, 10); }

std::optional<Timestamp> parse_iso8601(std::string_view text) noexcept {
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
        !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h) ||
        !parse_int(text.substr(14, 2), mi) || !parse_int(text.substr(17, 2), s)) {
        return std::nullopt;
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) {
        return std::nullopt;
    }
    const Timestamp days = sys_days{ymd}.time_since_epoch().count();
    return days * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::string format_decimal(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

std::optional<double> parse_decimal(std::string_view text) noexcept {
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

double round_significant(double v, int digits) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*e", digits - 1, v);
    return std::strtod(buf.data(), nullptr);
}

}  // namespace urbanaq
