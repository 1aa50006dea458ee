// Arbitrary-precision integer type and small number-theory helpers.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace arca {

using Int = boost::multiprecision::cpp_int;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(Int a, Int b) {
  a = abs_int(a);
  b = abs_int(b);
  while (b != 0) {
    Int r = a % b;
    a = b;
    b = r;
  }
  return a;
}

inline Int lcm_int(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs_int(a / gcd_int(a, b) * b);
}

// Floor division/modulo: fdiv rounds toward -inf, fmod is in [0, |b|).
inline Int fdiv(const Int& a, const Int& b) {
  if (b == 0) throw std::domain_error("fdiv by zero");
  Int q = a / b;  // truncated
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

inline Int fmod(const Int& a, const Int& b) { return a - fdiv(a, b) * b; }

inline Int ceil_div(const Int& a, const Int& b) { return -fdiv(-a, b); }

// Symmetric remainder in (-|m|/2, |m|/2].
inline Int smod(const Int& a, const Int& m) {
  Int r = fmod(a, abs_int(m));
  if (2 * r > abs_int(m)) r -= abs_int(m);
  return r;
}

// True iff n divides a.
inline bool divides(const Int& n, const Int& a) { return n != 0 && fmod(a, n) == 0; }

inline int to_int(const Int& a) {
  if (a > INT32_MAX || a < INT32_MIN) throw std::overflow_error("Int out of int range: " + a.str());
  return static_cast<int>(a);
}

inline long long to_ll(const Int& a) {
  if (a > INT64_MAX || a < INT64_MIN) throw std::overflow_error("Int out of ll range: " + a.str());
  return static_cast<long long>(a);
}

}  // namespace arca
