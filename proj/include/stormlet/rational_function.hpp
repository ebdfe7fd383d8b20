#pragma once

#include <string>

#include "stormlet/number.hpp"
#include "stormlet/polynomial.hpp"

namespace stormlet {

/// Quotient of two polynomials with rational coefficients.
///
/// Kept normalized: the denominator is non-zero with leading coefficient 1,
/// common monomial factors are cancelled, and exact polynomial divisibility
/// (plus a univariate gcd when only one parameter occurs) is exploited.
/// Multivariate gcds are not computed, so two equal functions may differ in
/// representation; equality is decided by cross-multiplication.
class RationalFunction {
 public:
  RationalFunction() : denominator_(Rational(1)) {}
  RationalFunction(const Rational& constant)  // NOLINT
      : numerator_(constant), denominator_(Rational(1)) {}
  RationalFunction(int constant) : RationalFunction(Rational(constant)) {}  // NOLINT
  RationalFunction(Polynomial numerator)  // NOLINT
      : numerator_(std::move(numerator)), denominator_(Rational(1)) {}
  RationalFunction(Polynomial numerator, Polynomial denominator);

  static RationalFunction parameter(const std::string& name) {
    return RationalFunction(Polynomial::variable(name));
  }

  const Polynomial& numerator() const noexcept { return numerator_; }
  const Polynomial& denominator() const noexcept { return denominator_; }

  bool is_zero() const noexcept { return numerator_.is_zero(); }
  bool is_constant() const;
  /// Value of a constant function.
  Rational constant_value() const;

  RationalFunction& operator+=(const RationalFunction& o);
  RationalFunction& operator-=(const RationalFunction& o);
  RationalFunction& operator*=(const RationalFunction& o);
  RationalFunction& operator/=(const RationalFunction& o);
  RationalFunction operator-() const;

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
  friend bool operator==(const RationalFunction& a, const RationalFunction& b);

  /// Exact value at a full parameter point; throws on a denominator root.
  Rational evaluate(const ParameterPoint& point) const;

  std::set<std::uint32_t> variables() const;

  /// "(numerator)/(denominator)".
  std::string to_string() const;

 private:
  void normalize();

  Polynomial numerator_;
  Polynomial denominator_;
};

template <>
struct number_traits<RationalFunction> {
  static constexpr bool exact = true;
  static constexpr bool ordered = false;
  static constexpr const char* name = "parametric";

  static RationalFunction zero() { return RationalFunction(); }
  static RationalFunction one() { return RationalFunction(1); }
  static bool is_zero(const RationalFunction& x) { return x.is_zero(); }
  static bool is_one(const RationalFunction& x) { return x == RationalFunction(1); }
  static bool equal(const RationalFunction& a, const RationalFunction& b) { return a == b; }
  static RationalFunction from_rational(const Rational& q) { return RationalFunction(q); }
  static std::string to_string(const RationalFunction& x) { return x.to_string(); }
};

}  // namespace stormlet
