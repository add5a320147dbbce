#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace explaineo {

enum class Kind { Boolean, Number, Money, Date, Text, Enum };

std::string_view to_string(Kind kind);
std::optional<Kind> parse_kind(std::string_view text);

/// Kinds that support <, <=, > and >=.
bool is_ordered(Kind kind);

/// Fixed-point amount in hundredths.
struct Money {
  std::int64_t cents = 0;
  friend auto operator<=>(const Money&, const Money&) = default;
};

/// Calendar date as a day count relative to 1970-01-01.
struct Date {
  std::int32_t days = 0;
  friend auto operator<=>(const Date&, const Date&) = default;
};

std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

/// Parses a decimal string ("12", "-3.5", "10000.00") into cents, rounding
/// half away from zero past the second decimal.
std::optional<Money> parse_money(std::string_view text);
std::string format_money(Money money);

/// Rounds a real amount to cents, half away from zero.
Money round_money(long double amount);

std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);

/// A typed scalar carried by a variable binding or a literal.
class Value {
 public:
  static Value boolean(bool b) { return Value(Kind::Boolean, b); }
  static Value number(double d) { return Value(Kind::Number, d); }
  static Value money(Money m) { return Value(Kind::Money, m); }
  static Value date(Date d) { return Value(Kind::Date, d); }
  static Value text(std::string s) { return Value(Kind::Text, std::move(s)); }
  static Value enumeration(std::string s) { return Value(Kind::Enum, std::move(s)); }

  /// Converts the textual form used by DSL literals, JSON strings and CLI
  /// parameters. Returns nullopt when the text is not a value of `kind`.
  static std::optional<Value> parse(Kind kind, std::string_view text);

  Kind kind() const noexcept { return kind_; }

  bool as_bool() const { return std::get<bool>(data_); }
  double as_number() const { return std::get<double>(data_); }
  Money as_money() const { return std::get<Money>(data_); }
  Date as_date() const { return std::get<Date>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }

  /// Numeric view used for ordering and arithmetic: numbers as is, money
  /// in units (not cents), dates as day counts.
  long double numeric() const;

  /// Canonical text form; `Value::parse(kind(), to_string())` round-trips.
  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  using Data = std::variant<bool, double, Money, Date, std::string>;
  Value(Kind kind, Data data) : kind_(kind), data_(std::move(data)) {}

  Kind kind_;
  Data data_;
};

/// Equality across kinds that compare with each other (number and money are
/// mutually comparable, everything else only within its own kind).
bool comparable(Kind a, Kind b);

/// Three-way comparison for comparable kinds. Precondition: comparable().
std::partial_ordering compare(const Value& a, const Value& b);

}  // namespace explaineo
