#include "finmet/ext_value.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <ostream>

#include "finmet/error.hpp"

namespace finmet {

namespace {

using i128 = __int128;

std::int64_t checked_narrow(i128 v, const char *what) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw SemanticError("E_OVERFLOW", std::string("value out of range in ") + what);
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

} // namespace

ExtValue::ExtValue(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ <= 0)
    throw ParseError("E_BAD_RATIONAL", "denominator must be positive, got " +
                                           std::to_string(den));
  if (num_ < 0)
    throw SemanticError("E_NEGATIVE",
                        "distances must be nonnegative, got " +
                            std::to_string(num) + "/" + std::to_string(den));
  const std::int64_t g = std::gcd(num_, den_);
  num_ /= g;
  den_ /= g;
}

ExtValue ExtValue::infinity() { return ExtValue(1, 0, raw_tag{}); }

ExtValue ExtValue::parse(const std::string &text) {
  if (text == "inf")
    return infinity();
  if (text.empty())
    throw ParseError("E_BAD_RATIONAL", "empty rational literal");
  const auto slash = text.find('/');
  const std::string num_part = text.substr(0, slash);
  const std::string den_part =
      slash == std::string::npos ? "1" : text.substr(slash + 1);
  auto parse_int = [&](const std::string &s) -> std::int64_t {
    if (s.empty())
      throw ParseError("E_BAD_RATIONAL", "malformed rational '" + text + "'");
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size())
      throw ParseError("E_BAD_RATIONAL", "malformed rational '" + text + "'");
    i128 value = 0;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw ParseError("E_BAD_RATIONAL", "malformed rational '" + text + "'");
      value = value * 10 + (s[i] - '0');
      if (value > std::numeric_limits<std::int64_t>::max())
        throw ParseError("E_BAD_RATIONAL", "rational too large '" + text + "'");
    }
    return s[0] == '-' ? -static_cast<std::int64_t>(value)
                       : static_cast<std::int64_t>(value);
  };
  const std::int64_t num = parse_int(num_part);
  const std::int64_t den = parse_int(den_part);
  if (den == 0)
    throw ParseError("E_BAD_RATIONAL", "zero denominator in '" + text + "'");
  if (num < 0 || den < 0)
    throw ParseError("E_BAD_RATIONAL", "negative value '" + text + "'");
  return ExtValue(num, den);
}

std::string ExtValue::str() const {
  if (is_infinite())
    return "inf";
  if (den_ == 1)
    return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

ExtValue ExtValue::operator+(const ExtValue &o) const {
  if (is_infinite() || o.is_infinite())
    return infinity();
  const i128 num = i128(num_) * o.den_ + i128(o.num_) * den_;
  const i128 den = i128(den_) * o.den_;
  const i128 g = gcd128(num, den);
  return ExtValue(checked_narrow(num / g, "addition"),
                  checked_narrow(den / g, "addition"), raw_tag{});
}

ExtValue ExtValue::abs_diff(const ExtValue &a, const ExtValue &b) {
  if (a.is_infinite() && b.is_infinite())
    return ExtValue();
  if (a.is_infinite() || b.is_infinite())
    return infinity();
  i128 num = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
  if (num < 0)
    num = -num;
  const i128 den = i128(a.den_) * b.den_;
  const i128 g = gcd128(num, den);
  return ExtValue(checked_narrow(num / g, "abs_diff"),
                  checked_narrow(den / g, "abs_diff"), raw_tag{});
}

ExtValue ExtValue::minus(const ExtValue &a, const ExtValue &b) {
  if (a.is_infinite() || b.is_infinite() || b > a)
    throw SemanticError("E_NEGATIVE", "invalid difference " + a.str() + " - " +
                                          b.str());
  return abs_diff(a, b);
}

ExtValue ExtValue::scaled_by(const ExtValue &factor) const {
  if (factor.is_infinite() || factor.is_zero())
    throw SemanticError("E_BAD_SCALE", "scale factor must be positive finite");
  if (is_infinite())
    return infinity();
  const i128 num = i128(num_) * factor.num_;
  const i128 den = i128(den_) * factor.den_;
  const i128 g = gcd128(num, den);
  return ExtValue(checked_narrow(num / g, "scaling"),
                  checked_narrow(den / g, "scaling"), raw_tag{});
}

ExtValue ExtValue::half() const {
  if (is_infinite())
    return infinity();
  const i128 num = num_;
  const i128 den = i128(den_) * 2;
  const i128 g = gcd128(num, den);
  return ExtValue(checked_narrow(num / g, "halving"),
                  checked_narrow(den / g, "halving"), raw_tag{});
}

std::strong_ordering ExtValue::operator<=>(const ExtValue &o) const {
  if (is_infinite() && o.is_infinite())
    return std::strong_ordering::equal;
  if (is_infinite())
    return std::strong_ordering::greater;
  if (o.is_infinite())
    return std::strong_ordering::less;
  const i128 lhs = i128(num_) * o.den_;
  const i128 rhs = i128(o.num_) * den_;
  if (lhs < rhs)
    return std::strong_ordering::less;
  if (lhs > rhs)
    return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream &operator<<(std::ostream &os, const ExtValue &v) {
  return os << v.str();
}

} // namespace finmet
