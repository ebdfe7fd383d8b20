#include "stormlet/polynomial.hpp"

#include <mutex>
#include <sstream>
#include <unordered_map>

#include "stormlet/errors.hpp"

namespace stormlet {

namespace {

struct PoolData {
  std::mutex mutex;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string> names;
};

PoolData& pool() {
  static PoolData data;
  return data;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

/// a / b if b divides a.
std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  for (const auto& [var, exp] : b) {
    while (i < a.size() && a[i].first < var) out.push_back(a[i++]);
    if (i == a.size() || a[i].first != var || a[i].second < exp) return std::nullopt;
    if (a[i].second > exp) out.emplace_back(var, a[i].second - exp);
    ++i;
  }
  while (i < a.size()) out.push_back(a[i++]);
  return out;
}

}  // namespace

std::uint32_t VariablePool::id(const std::string& name) {
  auto& p = pool();
  std::lock_guard lock(p.mutex);
  auto [it, inserted] = p.ids.try_emplace(name, static_cast<std::uint32_t>(p.names.size()));
  if (inserted) p.names.push_back(name);
  return it->second;
}

const std::string& VariablePool::name(std::uint32_t id) {
  auto& p = pool();
  std::lock_guard lock(p.mutex);
  return p.names.at(id);
}

std::uint32_t total_degree(const Monomial& m) {
  std::uint32_t d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  const auto da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  // Same degree: the monomial with the larger exponent on the first
  // differing (lowest-id) variable is larger.
  std::size_t i = 0;
  while (i < a.size() && i < b.size()) {
    if (a[i].first != b[i].first) return a[i].first > b[i].first;
    if (a[i].second != b[i].second) return a[i].second < b[i].second;
    ++i;
  }
  return i == a.size() && i < b.size();
}

Polynomial::Polynomial(const Rational& constant) {
  if (sgn(constant) != 0) terms_.emplace(Monomial{}, constant);
}

Polynomial Polynomial::variable(const std::string& name) {
  return term(Monomial{{VariablePool::id(name), 1}}, Rational(1));
}

Polynomial Polynomial::term(Monomial m, const Rational& coefficient) {
  Polynomial p;
  if (sgn(coefficient) != 0) p.terms_.emplace(std::move(m), coefficient);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Polynomial::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::pair<Monomial, Rational> Polynomial::leading_term() const {
  if (terms_.empty()) throw Error("leading term of the zero polynomial");
  return *terms_.rbegin();
}

std::set<std::uint32_t> Polynomial::variables() const {
  std::set<std::uint32_t> vars;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) vars.insert(v);
  return vars;
}

std::uint32_t Polynomial::degree_in(std::uint32_t var) const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m)
      if (v == var) d = std::max(d, e);
  return d;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  } else if (sgn(c) == 0) {
    terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, Rational(-c));
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), Rational(ca * cb));
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial Polynomial::scaled(const Rational& factor) const {
  if (sgn(factor) == 0) return Polynomial();
  Polynomial out(*this);
  for (auto& [m, c] : out.terms_) c *= factor;
  return out;
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial content = terms_.begin()->first;
  for (const auto& [m, c] : terms_) {
    Monomial next;
    for (const auto& [var, exp] : content) {
      for (const auto& [v, e] : m) {
        if (v == var) {
          next.emplace_back(var, std::min(exp, e));
          break;
        }
      }
    }
    content = std::move(next);
    if (content.empty()) break;
  }
  return content;
}

Polynomial Polynomial::divide_by_monomial(const Monomial& m) const {
  Polynomial out;
  for (const auto& [t, c] : terms_) {
    auto q = divide(t, m);
    if (!q) throw Error("monomial does not divide polynomial");
    out.terms_.emplace(std::move(*q), c);
  }
  return out;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw Error("division by the zero polynomial");
  const auto [lead_m, lead_c] = divisor.leading_term();
  Polynomial remainder(*this);
  Polynomial quotient;
  while (!remainder.is_zero()) {
    const auto [rm, rc] = remainder.leading_term();
    auto qm = divide(rm, lead_m);
    if (!qm) return std::nullopt;
    Polynomial t = term(std::move(*qm), Rational(rc / lead_c));
    quotient += t;
    remainder -= t * divisor;
  }
  return quotient;
}

Rational Polynomial::evaluate(const ParameterPoint& point) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational value = c;
    for (const auto& [v, e] : m) {
      const auto& name = VariablePool::name(v);
      auto it = point.find(name);
      if (it == point.end()) throw Error("no value given for parameter '" + name + "'");
      Rational power = 1;
      for (std::uint32_t k = 0; k < e; ++k) power *= it->second;
      value *= power;
    }
    total += value;
  }
  return total;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational magnitude = abs(c);
    if (first) {
      if (sgn(c) < 0) out << '-';
    } else {
      out << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (m.empty() || magnitude != 1) {
      out << stormlet::to_string(magnitude);
      wrote = true;
    }
    for (const auto& [v, e] : m) {
      if (wrote) out << '*';
      out << VariablePool::name(v);
      if (e > 1) out << '^' << e;
      wrote = true;
    }
  }
  return out.str();
}

namespace {

// Univariate helpers on polynomials over a single variable id.
Polynomial poly_remainder(Polynomial a, const Polynomial& b) {
  const auto [bm, bc] = b.leading_term();
  const auto bdeg = total_degree(bm);
  while (!a.is_zero()) {
    const auto [am, ac] = a.leading_term();
    const auto adeg = total_degree(am);
    if (adeg < bdeg) break;
    Monomial shift;
    if (adeg > bdeg) shift.emplace_back(bm.empty() ? am.front().first : bm.front().first, adeg - bdeg);
    a -= Polynomial::term(shift, Rational(ac / bc)) * b;
  }
  return a;
}

}  // namespace

std::optional<Polynomial> univariate_gcd(const Polynomial& a, const Polynomial& b) {
  auto vars = a.variables();
  auto vb = b.variables();
  vars.insert(vb.begin(), vb.end());
  if (vars.size() > 1) return std::nullopt;
  Polynomial x = a, y = b;
  while (!y.is_zero()) {
    Polynomial r = poly_remainder(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  if (x.is_zero()) return Polynomial(Rational(0));
  return x.scaled(Rational(1 / x.leading_term().second));
}

}  // namespace stormlet
