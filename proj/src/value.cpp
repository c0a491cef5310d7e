#include "ncs/value.hpp"

#include <cmath>
#include <cstdlib>

#include "ncs/errors.hpp"

namespace ncs {

namespace {
// Largest magnitude that still leaves headroom for sums of a few values.
constexpr int64_t kMaxUnits = INT64_MAX / 4;
}  // namespace

Value Value::from_double(double v) {
  if (!std::isfinite(v)) throw InputError("value is not finite");
  const double scaled = v * static_cast<double>(kScale);
  if (scaled >= static_cast<double>(kMaxUnits) ||
      scaled <= -static_cast<double>(kMaxUnits)) {
    throw InputError("value out of range: " + std::to_string(v));
  }
  return Value(static_cast<int64_t>(std::llround(scaled)));
}

Value Value::parse(std::string_view text) {
  const std::string_view original = text;
  auto fail = [&]() -> Value {
    throw ParseError("bad decimal literal: '" + std::string(original) + "'");
  };

  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.empty()) return fail();

  int64_t intpart = 0;
  size_t i = 0;
  if (text[0] < '0' || text[0] > '9') return fail();
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
    if (intpart > kMaxUnits / kScale / 10) return fail();
    intpart = intpart * 10 + (text[i] - '0');
  }

  int64_t frac = 0;
  if (i < text.size()) {
    if (text[i] != '.') return fail();
    ++i;
    int digits = 0;
    for (; i < text.size(); ++i, ++digits) {
      if (text[i] < '0' || text[i] > '9' || digits >= kFracDigits) return fail();
      frac = frac * 10 + (text[i] - '0');
    }
    if (digits == 0) return fail();
    for (; digits < kFracDigits; ++digits) frac *= 10;
  }

  int64_t units = intpart * kScale + frac;
  if (units > kMaxUnits) return fail();
  return Value(negative ? -units : units);
}

double Value::to_double() const {
  if (is_above_all()) throw InputError("no numeric image for the top sentinel");
  return static_cast<double>(units_) / static_cast<double>(kScale);
}

std::string Value::str() const {
  if (is_above_all()) return "ABOVE_ALL";
  const uint64_t mag = units_ < 0 ? static_cast<uint64_t>(-units_)
                                  : static_cast<uint64_t>(units_);
  uint64_t ip = mag / kScale;
  uint64_t fp = mag % kScale;
  std::string out;
  if (units_ < 0) out.push_back('-');
  out += std::to_string(ip);
  if (fp != 0) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%09llu", static_cast<unsigned long long>(fp));
    std::string frac(buf);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out.push_back('.');
    out += frac;
  }
  return out;
}

Value Value::negated() const {
  if (is_above_all()) throw InputError("the top sentinel cannot be negated");
  return Value(-units_);
}

}  // namespace ncs
