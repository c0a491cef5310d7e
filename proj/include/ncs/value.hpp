#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ncs {

// A criterion value stored as an exact decimal with nine fractional digits
// (a scaled 64-bit integer). Exact storage keeps threshold comparisons and
// file round-trips free of floating-point ties.
//
// A single sentinel, above_all(), compares greater than every finite value
// and encodes a frontier entry that no scale value satisfies.
class Value {
 public:
  static constexpr int64_t kScale = 1'000'000'000;  // nano units per 1.0
  static constexpr int kFracDigits = 9;

  constexpr Value() = default;

  static constexpr Value from_units(int64_t units) { return Value(units); }
  static constexpr Value above_all() { return Value(kAboveAll); }
  static Value from_double(double v);

  // Parses a plain decimal literal: [-]digits[.digits], at most nine
  // fractional digits. Throws ParseError otherwise.
  static Value parse(std::string_view text);

  constexpr int64_t units() const { return units_; }
  constexpr bool is_above_all() const { return units_ == kAboveAll; }

  double to_double() const;
  // Trimmed decimal rendering, e.g. "2.66", "-30.7", "16973".
  std::string str() const;

  // Finite values only; the sentinel has no mirror image.
  Value negated() const;

  friend constexpr auto operator<=>(Value a, Value b) = default;

 private:
  explicit constexpr Value(int64_t units) : units_(units) {}
  static constexpr int64_t kAboveAll = INT64_MAX;

  int64_t units_ = 0;
};

}  // namespace ncs
