#include "dcmd/values.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "dcmd/errors.hpp"

namespace dcmd {

namespace {

constexpr int64_t kCentisPerDay = 24LL * 3600 * 100;

// Days-from-civil / civil-from-days (Hinnant's algorithm).
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_fixed_uint(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

std::optional<int64_t> parse_time_of_day(std::string_view s) {
    // HH:MM:SS.cc
    int h, mi, se, cs;
    if (s.size() != 11) return std::nullopt;
    if (!parse_fixed_uint(s, 0, 2, h) || s[2] != ':' || !parse_fixed_uint(s, 3, 2, mi) ||
        s[5] != ':' || !parse_fixed_uint(s, 6, 2, se) || s[8] != '.' ||
        !parse_fixed_uint(s, 9, 2, cs))
        return std::nullopt;
    if (h > 23 || mi > 59 || se > 59) return std::nullopt;
    return ((h * 3600LL + mi * 60 + se) * 100 + cs);
}

}  // namespace

std::string to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::string_v: return "string";
        case ValueKind::double_v: return "double";
        case ValueKind::datetime_v: return "datetime";
        case ValueKind::boolean_v: return "boolean";
    }
    return "?";
}

std::optional<ValueKind> value_kind_from_name(std::string_view name) {
    if (name == "string") return ValueKind::string_v;
    if (name == "double") return ValueKind::double_v;
    if (name == "datetime") return ValueKind::datetime_v;
    if (name == "boolean") return ValueKind::boolean_v;
    return std::nullopt;
}

std::optional<DateTime> DateTime::try_parse(std::string_view text) {
    if (text.size() == 11) {
        auto tod = parse_time_of_day(text);
        if (!tod) return std::nullopt;
        return DateTime{*tod};
    }
    // YYYY-MM-DD HH:MM:SS.cc
    if (text.size() == 22) {
        int y, mo, d;
        if (!parse_fixed_uint(text, 0, 4, y) || text[4] != '-' ||
            !parse_fixed_uint(text, 5, 2, mo) || text[7] != '-' ||
            !parse_fixed_uint(text, 8, 2, d) || text[10] != ' ')
            return std::nullopt;
        if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
        auto tod = parse_time_of_day(text.substr(11));
        if (!tod) return std::nullopt;
        return DateTime{days_from_civil(y, mo, d) * kCentisPerDay + *tod};
    }
    return std::nullopt;
}

DateTime DateTime::parse(std::string_view text) {
    auto v = try_parse(text);
    if (!v) throw ParseError("invalid datetime '" + std::string(text) + "'", 1, 1);
    return *v;
}

std::string DateTime::to_string() const {
    int64_t day = centiseconds >= 0 ? centiseconds / kCentisPerDay
                                    : (centiseconds - kCentisPerDay + 1) / kCentisPerDay;
    int64_t tod = centiseconds - day * kCentisPerDay;
    int cs = static_cast<int>(tod % 100);
    int64_t secs = tod / 100;
    int h = static_cast<int>(secs / 3600);
    int mi = static_cast<int>((secs / 60) % 60);
    int se = static_cast<int>(secs % 60);
    char buf[32];
    if (day == 0) {
        std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d.%02d", h, mi, se, cs);
        return buf;
    }
    int y, mo, d;
    civil_from_days(day, y, mo, d);
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d.%02d", y, mo, d, h, mi, se, cs);
    return buf;
}

int AttrValue::compare(const AttrValue& other) const {
    if (kind() != other.kind())
        return static_cast<int>(kind()) < static_cast<int>(other.kind()) ? -1 : 1;
    switch (kind()) {
        case ValueKind::string_v: {
            int c = as_string().compare(other.as_string());
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case ValueKind::double_v: {
            double a = as_double(), b = other.as_double();
            return a < b ? -1 : (a > b ? 1 : 0);
        }
        case ValueKind::datetime_v: {
            auto a = as_datetime().centiseconds, b = other.as_datetime().centiseconds;
            return a < b ? -1 : (a > b ? 1 : 0);
        }
        case ValueKind::boolean_v: {
            int a = as_bool() ? 1 : 0, b = other.as_bool() ? 1 : 0;
            return a - b;
        }
    }
    return 0;
}

bool AttrValue::is_finite() const {
    return kind() != ValueKind::double_v || std::isfinite(as_double());
}

std::string AttrValue::to_display() const {
    switch (kind()) {
        case ValueKind::string_v: return as_string();
        case ValueKind::double_v: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", as_double());
            return buf;
        }
        case ValueKind::datetime_v: return as_datetime().to_string();
        case ValueKind::boolean_v: return as_bool() ? "true" : "false";
    }
    return "";
}

}  // namespace dcmd
