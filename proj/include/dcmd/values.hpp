#pragma once
// Attribute value primitives: the four value kinds carried by the knowledge
// graph, plus a 10 ms resolution timestamp type.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace dcmd {

enum class ValueKind : uint8_t { string_v = 0, double_v = 1, datetime_v = 2, boolean_v = 3 };

std::string to_string(ValueKind kind);
std::optional<ValueKind> value_kind_from_name(std::string_view name);

// Timestamp with 10 ms (centisecond) resolution. Day-less values render as
// "HH:MM:SS.cc"; dated values as "YYYY-MM-DD HH:MM:SS.cc".
struct DateTime {
    int64_t centiseconds = 0;

    static DateTime from_centiseconds(int64_t cs) { return DateTime{cs}; }
    static std::optional<DateTime> try_parse(std::string_view text);
    static DateTime parse(std::string_view text);  // throws ParseError

    DateTime plus_centiseconds(int64_t cs) const { return DateTime{centiseconds + cs}; }
    std::string to_string() const;

    auto operator<=>(const DateTime&) const = default;
};

// Tagged value. Constructed through the named factories only, so string
// literals never decay into the bool alternative.
class AttrValue {
public:
    AttrValue() : v_(std::string{}) {}

    static AttrValue of_string(std::string s) { return AttrValue(Var(std::move(s))); }
    static AttrValue of_double(double d) { return AttrValue(Var(d)); }
    static AttrValue of_datetime(DateTime t) { return AttrValue(Var(t)); }
    static AttrValue of_bool(bool b) { return AttrValue(Var(b)); }

    ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }

    const std::string& as_string() const { return std::get<std::string>(v_); }
    double as_double() const { return std::get<double>(v_); }
    DateTime as_datetime() const { return std::get<DateTime>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }

    bool operator==(const AttrValue& other) const { return v_ == other.v_; }

    // Total order over (kind, value); doubles must be finite.
    int compare(const AttrValue& other) const;
    bool operator<(const AttrValue& other) const { return compare(other) < 0; }

    bool is_finite() const;
    std::string to_display() const;

private:
    using Var = std::variant<std::string, double, DateTime, bool>;
    explicit AttrValue(Var v) : v_(std::move(v)) {}
    Var v_;
};

}  // namespace dcmd
