#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stormlet/number.hpp"

namespace stormlet {

/// Process-wide registry of parameter names. Ids are handed out in
/// registration order and fix the variable order of every polynomial.
class VariablePool {
 public:
  static std::uint32_t id(const std::string& name);
  static const std::string& name(std::uint32_t id);
};

/// Sorted (variable id, exponent > 0) pairs.
using Monomial = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

std::uint32_t total_degree(const Monomial& m);

/// Graded lexicographic order; the largest monomial is the leading one.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

using ParameterPoint = std::map<std::string, Rational>;

class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, GradedLex>;

  Polynomial() = default;
  Polynomial(const Rational& constant);  // NOLINT(google-explicit-constructor)
  Polynomial(int constant) : Polynomial(Rational(constant)) {}  // NOLINT
  static Polynomial variable(const std::string& name);
  static Polynomial term(Monomial m, const Rational& coefficient);

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // coefficient of the empty monomial
  const Terms& terms() const noexcept { return terms_; }
  std::pair<Monomial, Rational> leading_term() const;

  std::set<std::uint32_t> variables() const;
  std::uint32_t degree_in(std::uint32_t var) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial operator-() const;
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  Polynomial scaled(const Rational& factor) const;

  /// Greatest monomial dividing every term (empty for zero).
  Monomial monomial_content() const;
  Polynomial divide_by_monomial(const Monomial& m) const;

  /// Quotient if `divisor` divides this polynomial exactly.
  std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

  Rational evaluate(const ParameterPoint& point) const;

  std::string to_string() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

/// Monic gcd of two polynomials in (at most) one shared variable; nullopt
/// when the inputs are genuinely multivariate.
std::optional<Polynomial> univariate_gcd(const Polynomial& a, const Polynomial& b);

}  // namespace stormlet
