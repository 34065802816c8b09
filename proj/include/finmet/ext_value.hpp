#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace finmet {

/// Exact nonnegative rational extended with infinity.
///
/// Values are kept in reduced form (gcd(num, den) == 1, den > 0); infinity is
/// the unique absorbing element for addition and the maximum of the order.
/// All arithmetic is checked: overflow past 64-bit reduced form throws.
class ExtValue {
public:
  ExtValue() : num_(0), den_(1) {} // zero

  /// Reduced finite rational num/den; throws E_NEGATIVE for num < 0 and
  /// E_BAD_RATIONAL for den <= 0.
  ExtValue(std::int64_t num, std::int64_t den);
  static ExtValue from_int(std::int64_t n) { return ExtValue(n, 1); }
  static ExtValue infinity();

  /// Parses "p/q", "n" or "inf". Throws ParseError (E_BAD_RATIONAL) on
  /// malformed text, "1/0", or negative values.
  static ExtValue parse(const std::string &text);

  bool is_infinite() const { return den_ == 0; }
  bool is_zero() const { return num_ == 0 && den_ != 0; }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  /// Canonical text form: "inf", "n", or "p/q" reduced.
  std::string str() const;

  ExtValue operator+(const ExtValue &o) const; // infinity-absorbing
  ExtValue &operator+=(const ExtValue &o) { return *this = *this + o; }

  /// |a - b| with the distortion conventions: both infinite -> 0,
  /// exactly one infinite -> infinity.
  static ExtValue abs_diff(const ExtValue &a, const ExtValue &b);

  /// Finite difference a - b; requires a >= b and both finite.
  static ExtValue minus(const ExtValue &a, const ExtValue &b);

  /// Scale by a positive finite rational factor.
  ExtValue scaled_by(const ExtValue &factor) const;

  ExtValue half() const; // divide by 2 (infinity stays infinite)

  std::strong_ordering operator<=>(const ExtValue &o) const;
  bool operator==(const ExtValue &o) const = default;

  static const ExtValue &min(const ExtValue &a, const ExtValue &b) {
    return (b < a) ? b : a;
  }
  static const ExtValue &max(const ExtValue &a, const ExtValue &b) {
    return (a < b) ? b : a;
  }

private:
  struct raw_tag {};
  ExtValue(std::int64_t num, std::int64_t den, raw_tag) : num_(num), den_(den) {}

  std::int64_t num_;
  std::int64_t den_; // 0 encodes infinity (num_ == 1)
};

std::ostream &operator<<(std::ostream &os, const ExtValue &v);

} // namespace finmet
