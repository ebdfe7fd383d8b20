#include "stormlet/rational_function.hpp"

#include "stormlet/errors.hpp"

namespace stormlet {

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  if (denominator_.is_zero()) throw Error("rational function with zero denominator");
  normalize();
}

void RationalFunction::normalize() {
  if (numerator_.is_zero()) {
    denominator_ = Polynomial(Rational(1));
    return;
  }
  // Cancel the common monomial factor.
  Monomial cn = numerator_.monomial_content();
  Monomial cd = denominator_.monomial_content();
  Monomial common;
  for (const auto& [v, e] : cn)
    for (const auto& [w, f] : cd)
      if (v == w) common.emplace_back(v, std::min(e, f));
  if (!common.empty()) {
    numerator_ = numerator_.divide_by_monomial(common);
    denominator_ = denominator_.divide_by_monomial(common);
  }
  if (!denominator_.is_constant()) {
    if (auto q = numerator_.divide_exact(denominator_)) {
      numerator_ = std::move(*q);
      denominator_ = Polynomial(Rational(1));
    } else if (auto g = univariate_gcd(numerator_, denominator_); g && !g->is_constant()) {
      numerator_ = *numerator_.divide_exact(*g);
      denominator_ = *denominator_.divide_exact(*g);
    }
  }
  const Rational lead = denominator_.leading_term().second;
  if (lead != 1) {
    const Rational inv = 1 / lead;
    numerator_ = numerator_.scaled(inv);
    denominator_ = denominator_.scaled(inv);
  }
}

bool RationalFunction::is_constant() const {
  return numerator_.is_constant() && denominator_.is_constant();
}

Rational RationalFunction::constant_value() const {
  if (!is_constant()) throw Error("rational function is not constant: " + to_string());
  return numerator_.constant_value() / denominator_.constant_value();
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
  if (o.is_zero()) return *this;
  if (denominator_ == o.denominator_) {
    numerator_ += o.numerator_;
  } else {
    numerator_ = numerator_ * o.denominator_ + o.numerator_ * denominator_;
    denominator_ = denominator_ * o.denominator_;
  }
  normalize();
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) {
  return *this += -o;
}

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = RationalFunction();
  numerator_ = numerator_ * o.numerator_;
  denominator_ = denominator_ * o.denominator_;
  normalize();
  return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& o) {
  if (o.is_zero()) throw Error("division by the zero rational function");
  numerator_ = numerator_ * o.denominator_;
  denominator_ = denominator_ * o.numerator_;
  normalize();
  return *this;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction out(*this);
  out.numerator_ = -out.numerator_;
  return out;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  if (a.denominator_ == b.denominator_) return a.numerator_ == b.numerator_;
  return a.numerator_ * b.denominator_ == b.numerator_ * a.denominator_;
}

Rational RationalFunction::evaluate(const ParameterPoint& point) const {
  const Rational den = denominator_.evaluate(point);
  if (sgn(den) == 0) throw Error("parameter point is a root of the denominator of " + to_string());
  return numerator_.evaluate(point) / den;
}

std::set<std::uint32_t> RationalFunction::variables() const {
  auto vars = numerator_.variables();
  auto d = denominator_.variables();
  vars.insert(d.begin(), d.end());
  return vars;
}

std::string RationalFunction::to_string() const {
  return "(" + numerator_.to_string() + ")/(" + denominator_.to_string() + ")";
}

}  // namespace stormlet
