#include <doctest.h>

#include <random>

#include "stormlet/number.hpp"
#include "stormlet/rational_function.hpp"
#include "stormlet/solvers.hpp"
#include "support.hpp"

using namespace stormlet;

namespace {

/// Smallest denominator first, then smallest numerator, by enumeration.
Rational brute_force_simplest(const Rational& lo, const Rational& hi) {
  for (long q = 1;; ++q) {
    Rational candidate(ceil(lo * q), q);
    candidate.canonicalize();
    if (candidate <= hi) return candidate;
  }
}

}  // namespace

TEST_CASE("rational literals") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK_FALSE(is_number_literal("abc"));
  CHECK_FALSE(is_number_literal("1/0"));
  CHECK_THROWS_AS(parse_rational("0.5.5"), Error);
}

TEST_CASE("doubles print with six significant digits") {
  CHECK(format_double(1.0 / 6) == "0.166667");
  CHECK(format_double(11.0 / 3) == "3.66667");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("doubles convert to rationals exactly") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(0.1) != Rational(1, 10));
  CHECK(rational_from_double(0.1).get_d() == 0.1);
}

TEST_CASE("simplest rational matches enumeration") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> num(0, 400), den(1, 60), width(0, 40);
  for (int i = 0; i < 300; ++i) {
    const Rational lo = test::frac(num(rng), den(rng));
    const Rational hi = lo + test::frac(width(rng), 997);
    CAPTURE(lo);
    CAPTURE(hi);
    CHECK(simplest_rational_between(lo, hi) == brute_force_simplest(lo, hi));
  }
  CHECK(simplest_rational_between(Rational(1, 3), Rational(1, 3)) == Rational(1, 3));
  CHECK(simplest_rational_between(test::frac(3333324, 10000000), test::frac(3333344, 10000000)) == Rational(1, 3));
  CHECK(simplest_rational_between(Rational(3, 2), Rational(5, 2)) == Rational(2));
}

TEST_CASE("polynomial arithmetic") {
  const auto x = Polynomial::variable("x");
  const Polynomial one(Rational(1));
  CHECK((x + one) * (x - one) == x * x - one);
  CHECK((x * x - one).divide_exact(x - one) == x + one);
  CHECK_FALSE((x * x + one).divide_exact(x - one).has_value());
  const auto g = univariate_gcd(x * x - one, x * x + x + x + one);
  REQUIRE(g.has_value());
  CHECK(g->evaluate({{"x", Rational(-1)}}) == 0);
  CHECK(g->evaluate({{"x", Rational(1)}}) != 0);
}

TEST_CASE("rational functions agree with pointwise arithmetic") {
  const RationalFunction p(Polynomial::variable("p"));
  const RationalFunction q(Polynomial::variable("q"));
  const RationalFunction one(Rational(1));
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> pick(1, 96);
  // Random expression trees over p and q evaluated two ways.
  std::vector<RationalFunction> pool{p, q, one, RationalFunction(Rational(1, 3))};
  for (int i = 0; i < 40; ++i) {
    const auto& a = pool[static_cast<std::size_t>(pick(rng)) % pool.size()];
    const auto& b = pool[static_cast<std::size_t>(pick(rng)) % pool.size()];
    switch (pick(rng) % 4) {
      case 0: pool.push_back(a + b); break;
      case 1: pool.push_back(a - b); break;
      case 2: pool.push_back(a * b); break;
      default: pool.push_back(a / (b + one + one)); break;
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    const ParameterPoint at{{"p", test::frac(pick(rng), 97)}, {"q", test::frac(pick(rng), 97)}};
    std::vector<Rational> values{at.at("p"), at.at("q"), Rational(1), Rational(1, 3)};
    std::mt19937 replay(11);
    std::uniform_int_distribution<long> again(1, 96);
    for (int i = 0; i < 40; ++i) {
      const auto& a = values[static_cast<std::size_t>(again(replay)) % values.size()];
      const auto& b = values[static_cast<std::size_t>(again(replay)) % values.size()];
      switch (again(replay) % 4) {
        case 0: values.push_back(a + b); break;
        case 1: values.push_back(a - b); break;
        case 2: values.push_back(a * b); break;
        default: values.push_back(a / (b + 2)); break;
      }
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      Rational expected = values[i];
      expected.canonicalize();
      CHECK(pool[i].evaluate(at) == expected);
    }
  }
}

TEST_CASE("rational function normal form") {
  const auto x = Polynomial::variable("x");
  const Polynomial one(Rational(1));
  const RationalFunction f(x * x - one, x + one);
  CHECK(f == RationalFunction(x - one, one));
  CHECK(f.to_string() == RationalFunction(x - one, one).to_string());
  CHECK((RationalFunction(x, one) / RationalFunction(x, one)).is_constant());
}
