#include "explaineo/value.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace explaineo {

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::Boolean: return "boolean";
    case Kind::Number: return "number";
    case Kind::Money: return "money";
    case Kind::Date: return "date";
    case Kind::Text: return "text";
    case Kind::Enum: return "enum";
  }
  return "?";
}

std::optional<Kind> parse_kind(std::string_view text) {
  if (text == "boolean") return Kind::Boolean;
  if (text == "number") return Kind::Number;
  if (text == "money") return Kind::Money;
  if (text == "date") return Kind::Date;
  if (text == "text") return Kind::Text;
  if (text == "enum") return Kind::Enum;
  return std::nullopt;
}

bool is_ordered(Kind kind) {
  return kind == Kind::Number || kind == Kind::Money || kind == Kind::Date;
}

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t from, std::size_t len, int& out) {
    auto [ptr, ec] = std::from_chars(text.data() + from, text.data() + from + len, out);
    return ec == std::errc{} && ptr == text.data() + from + len;
  };
  int y = 0, m = 0, d = 0;
  if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

std::string format_iso_date(Date date) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{date.days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<Money> parse_money(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-') {
    negative = true;
    ++i;
  }
  std::int64_t units = 0;
  std::size_t int_digits = 0;
  for (; i < text.size() && text[i] != '.'; ++i) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
    units = units * 10 + (text[i] - '0');
    if (units > 90'000'000'000'000'000LL / 100) return std::nullopt;
    ++int_digits;
  }
  if (int_digits == 0) return std::nullopt;
  std::int64_t fraction = 0;
  bool round_up = false;
  if (i < text.size()) {
    ++i;  // '.'
    std::size_t frac_digits = 0;
    for (; i < text.size(); ++i, ++frac_digits) {
      const char c = text[i];
      if (c < '0' || c > '9') return std::nullopt;
      if (frac_digits < 2) {
        fraction = fraction * 10 + (c - '0');
      } else if (frac_digits == 2) {
        round_up = c >= '5';
      }
    }
    if (frac_digits == 0) return std::nullopt;
    if (frac_digits == 1) fraction *= 10;
  }
  std::int64_t cents = units * 100 + fraction + (round_up ? 1 : 0);
  return Money{negative ? -cents : cents};
}

std::string format_money(Money money) {
  const std::int64_t abs = money.cents < 0 ? -money.cents : money.cents;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", money.cents < 0 ? "-" : "",
                static_cast<long long>(abs / 100), static_cast<long long>(abs % 100));
  return buf;
}

Money round_money(long double amount) {
  const long double scaled = amount * 100.0L;
  // Binary fractions such as 1.005 land just below the half; nudge by a
  // relative epsilon so they round the way the decimal reads.
  const long double nudge = std::copysign(1e-9L * std::max(1.0L, std::fabs(scaled)), scaled);
  return Money{static_cast<std::int64_t>(std::llround(scaled + nudge))};
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out,
                                   std::chars_format::fixed);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(out)) {
    return std::nullopt;
  }
  return out;
}

std::optional<Value> Value::parse(Kind kind, std::string_view text) {
  switch (kind) {
    case Kind::Boolean:
      if (text == "true") return Value::boolean(true);
      if (text == "false") return Value::boolean(false);
      return std::nullopt;
    case Kind::Number:
      if (auto n = parse_number(text)) return Value::number(*n);
      return std::nullopt;
    case Kind::Money:
      if (auto m = parse_money(text)) return Value::money(*m);
      return std::nullopt;
    case Kind::Date:
      if (auto d = parse_iso_date(text)) return Value::date(*d);
      return std::nullopt;
    case Kind::Text: return Value::text(std::string(text));
    case Kind::Enum: return Value::enumeration(std::string(text));
  }
  return std::nullopt;
}

long double Value::numeric() const {
  switch (kind_) {
    case Kind::Number: return as_number();
    case Kind::Money: return static_cast<long double>(as_money().cents) / 100.0L;
    case Kind::Date: return as_date().days;
    case Kind::Boolean: return as_bool() ? 1 : 0;
    default: return 0;
  }
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Boolean: return as_bool() ? "true" : "false";
    case Kind::Number: return format_number(as_number());
    case Kind::Money: return format_money(as_money());
    case Kind::Date: return format_iso_date(as_date());
    case Kind::Text:
    case Kind::Enum: return as_string();
  }
  return {};
}

bool comparable(Kind a, Kind b) {
  if (a == b) return true;
  const auto numeric = [](Kind k) { return k == Kind::Number || k == Kind::Money; };
  return numeric(a) && numeric(b);
}

std::partial_ordering compare(const Value& a, const Value& b) {
  if (a.kind() == Kind::Money && b.kind() == Kind::Money) {
    return a.as_money().cents <=> b.as_money().cents;
  }
  // cents / 100.0 is the double nearest the decimal, as is a parsed number
  // literal, so 49.32 and 49.32 EUR compare equal.
  auto as_double = [](const Value& v) {
    return v.kind() == Kind::Money ? static_cast<double>(v.as_money().cents) / 100.0 : v.as_number();
  };
  const auto numeric = [](Kind k) { return k == Kind::Number || k == Kind::Money; };
  if (numeric(a.kind()) && numeric(b.kind())) return as_double(a) <=> as_double(b);
  if (is_ordered(a.kind()) && is_ordered(b.kind())) return a.numeric() <=> b.numeric();
  if (a.kind() == Kind::Boolean && b.kind() == Kind::Boolean) {
    return a.as_bool() == b.as_bool() ? std::partial_ordering::equivalent
                                      : std::partial_ordering::unordered;
  }
  if ((a.kind() == Kind::Text || a.kind() == Kind::Enum) &&
      (b.kind() == Kind::Text || b.kind() == Kind::Enum)) {
    return a.as_string() <=> b.as_string();
  }
  return std::partial_ordering::unordered;
}

}  // namespace explaineo
