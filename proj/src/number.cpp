#include "stormlet/number.hpp"

#include <cctype>
#include <cstdio>

#include "stormlet/errors.hpp"

namespace stormlet {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column,
                       std::vector<std::string> expected)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            message),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::optional<Rational> parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) {
      exp_negative = exp[0] == '-';
      exp.remove_prefix(1);
    }
    if (!all_digits(exp) || exp.size() > 6) return std::nullopt;
    exponent = std::stol(std::string(exp));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;
  if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;
  if (int_part.empty() && mantissa.find('.') == std::string_view::npos) return std::nullopt;

  std::string digits = std::string(int_part) + std::string(frac_part);
  if (digits.empty()) return std::nullopt;
  Integer numerator(digits, 10);
  exponent -= static_cast<long>(frac_part.size());
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational result;
  if (exponent >= 0) {
    result = Rational(numerator * scale);
  } else {
    result = Rational(numerator, scale);
    result.canonicalize();
  }
  if (negative) result = -result;
  return result;
}

std::optional<Rational> try_parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_decimal(text.substr(0, slash));
    auto den = parse_decimal(text.substr(slash + 1));
    if (!num || !den || sgn(*den) == 0) return std::nullopt;
    Rational r = *num / *den;
    return r;
  }
  return parse_decimal(text);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto r = try_parse(text);
  if (!r) throw Error("malformed number '" + std::string(text) + "'");
  return *r;
}

bool is_number_literal(std::string_view text) { return try_parse(text).has_value(); }

std::string to_string(const Rational& value) { return value.get_str(); }

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  std::string s(buffer);
  if (s == "-0") s = "0";
  return s;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error("cannot convert non-finite double to a rational");
  Rational r(value);
  r.canonicalize();
  return r;
}

Integer floor(const Rational& value) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& value) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

}  // namespace stormlet
