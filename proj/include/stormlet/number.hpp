#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace stormlet {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "3", "-0.25", "1e-3", "2.5E+2" or "1/10" into an exact rational.
Rational parse_rational(std::string_view text);

/// True if `text` is a syntactically valid number for parse_rational.
bool is_number_literal(std::string_view text);

/// Canonical "p/q" (or "p" when q = 1).
std::string to_string(const Rational& value);

/// Six significant digits, the way results are reported for floats.
std::string format_double(double value);

/// Exact rational value of a finite double.
Rational rational_from_double(double value);

Integer floor(const Rational& value);
Integer ceil(const Rational& value);

/// Number domains the model and solver templates are instantiated with.
/// Every domain supplies the field operations through its own operators;
/// number_traits adds the few things the operators cannot express.
template <typename N>
struct number_traits;

template <>
struct number_traits<double> {
  static constexpr bool exact = false;
  static constexpr bool ordered = true;
  static constexpr const char* name = "float";

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x) { return x == 0.0; }
  static bool is_one(double x) { return x == 1.0; }
  static bool equal(double a, double b) { return a == b; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
  static std::string to_string(double x) { return format_double(x); }
};

template <>
struct number_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool ordered = true;
  static constexpr const char* name = "exact";

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static bool is_one(const Rational& x) { return x == 1; }
  static bool equal(const Rational& a, const Rational& b) { return a == b; }
  static Rational from_rational(const Rational& q) { return q; }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational abs(const Rational& x) { return Rational(::abs(x)); }
  static std::string to_string(const Rational& x) { return stormlet::to_string(x); }
};

template <typename N>
concept OrderedNumber = number_traits<N>::ordered;

/// A value that may be +infinity; expected rewards use it for states that
/// fail to reach the goal almost surely.
template <typename N>
struct Extended {
  N value{};
  bool infinite = false;

  static Extended infinity() {
    Extended e;
    e.value = number_traits<N>::zero();
    e.infinite = true;
    return e;
  }
  static Extended finite(N v) { return Extended{std::move(v), false}; }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return number_traits<N>::equal(a.value, b.value);
  }
};

template <typename N>
std::string to_string(const Extended<N>& x) {
  return x.infinite ? std::string("inf") : number_traits<N>::to_string(x.value);
}

}  // namespace stormlet
