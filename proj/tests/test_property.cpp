#include <doctest.h>

#include "stormlet/errors.hpp"
#include "stormlet/property.hpp"

using namespace stormlet;

TEST_CASE("properties survive a print and parse round trip") {
  const std::vector<std::string> texts = {
      "P=? [F \"one\"]",
      "Pmax=? [!\"trap\" U \"goal\"]",
      "Pmin>=0.5 [F<=10 \"done\"]",
      "P<0.25 [X \"a\" & !\"b\"]",
      "R{\"flips\"}=? [F \"done\"]",
      "Rmin=? [F \"end\"]",
      "P=? [G \"safe\"]",
      "P=? [F<2.5 \"t\"]",
      "P>=1/3 [true U \"x\"]",
      "\"named\": P=? [F s=7 & d>2]",
  };
  for (const auto& text : texts) {
    CAPTURE(text);
    const Property p = parse_property(text);
    CHECK(parse_property(to_string(p)) == p);
  }
}

TEST_CASE("property fields") {
  const Property p = parse_property("\"face\": Pmax>=0.5 [F<=10 \"done\"]");
  CHECK(p.name == "face");
  CHECK(p.op == Operator::Probability);
  CHECK(p.direction == Direction::Max);
  REQUIRE(p.threshold);
  CHECK(p.threshold->comparison == Comparison::GreaterEqual);
  CHECK(p.threshold->value == Rational(1, 2));
  REQUIRE(p.path.bound);
  CHECK(p.path.bound->value == 10);
  CHECK_FALSE(p.path.bound->strict);
  const Property r = parse_property("R{\"flips\"}=? [F \"done\"]");
  CHECK(r.op == Operator::Reward);
  CHECK(r.reward_name == std::optional<std::string>("flips"));
}

TEST_CASE("several properties per text") {
  CHECK(parse_properties("P=? [F \"a\"]; P=? [F \"b\"]\n// comment\nP=? [F \"c\"]\n").size() == 3);
}

TEST_CASE("rejected properties") {
  for (const std::string text :
       {"P=? [F]", "P=? [F \"a\"", "P?= [F \"a\"]", "Q=? [F \"a\"]", "P=? [F<= \"a\"]", "R{flips}=? [F \"a\"]",
        "P=? [\"a\" U]", "P>=x [F \"a\"]"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_property(text), ParseError);
  }
}

TEST_CASE("G is the complement of F") {
  const Property g = desugar(parse_property("P=? [G \"safe\"]"));
  CHECK(g.complement);
  CHECK(g.path.kind == PathKind::Until);
  const Property gmax = desugar(parse_property("Pmax=? [G \"safe\"]"));
  CHECK(gmax.direction == Direction::Min);
}
