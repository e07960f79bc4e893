#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>

#include "seqpps/errors.hpp"

namespace seqpps {

// Arbitrary-precision rational scalar for the exact arithmetic mode. Kept
// behind an alias so the backend is swappable in one place.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline std::string format_rational(const Rational& r) {
  return r.str();  // "p/q" or "p" when q == 1
}

// Parse a decimal string ("0.4", "-1.25e-3") or a fraction ("3/56") exactly.
inline Rational parse_decimal(const std::string& s) {
  if (s.empty()) throw ValidationError("empty numeric field");
  if (s.find('/') != std::string::npos) {
    try {
      return Rational(s);
    } catch (const std::exception&) {
      throw ValidationError("malformed fraction: " + s);
    }
  }
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
  BigInt mantissa = 0;
  long long exp10 = 0;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (dot) --exp10;
      digits = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else if ((c == 'e' || c == 'E') && digits) {
      ++i;
      bool eneg = false;
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
      if (i >= s.size()) throw ValidationError("malformed number: " + s);
      long long e = 0;
      for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
          throw ValidationError("malformed number: " + s);
        e = e * 10 + (s[i] - '0');
        if (e > 100000) throw ValidationError("exponent out of range: " + s);
      }
      exp10 += eneg ? -e : e;
      break;
    } else {
      throw ValidationError("malformed number: " + s);
    }
  }
  if (!digits) throw ValidationError("malformed number: " + s);
  Rational r(mantissa);
  if (exp10 > 0)
    r *= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exp10)));
  else if (exp10 < 0)
    r /= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-exp10)));
  return neg ? -r : r;
}

}  // namespace seqpps
