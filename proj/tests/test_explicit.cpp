#include <doctest.h>

#include "stormlet/explicit_format.hpp"
#include "support.hpp"

using namespace stormlet;

TEST_CASE("three-state chain") {
  const auto m = test::load_explicit("three");
  CHECK(m.kind == ModelKind::Dtmc);
  CHECK(m.state_count() == 3);
  CHECK(m.transition_count() == 4);
  CHECK(m.labeling.get("t")[1]);
  CHECK(m.initial_states.indices() == std::vector<std::size_t>{0});
  const auto r = test::run(m, parse_property("P=? [F \"t\"]"), SolverMethod::Gaussian);
  CHECK(r.value_at_initial().value == Rational(1, 2));
}

TEST_CASE("explicit MDP with state rewards") {
  const auto m = test::load_explicit("choice");
  CHECK(m.kind == ModelKind::Mdp);
  CHECK(m.choices.choice_count(0) == 2);
  REQUIRE(m.rewards.count(""));
  CHECK((*m.rewards.at("").state_rewards)[0] == 1);
}

TEST_CASE("written files parse back to the same model") {
  for (const std::string stem : {"three", "choice"}) {
    const auto m = test::load_explicit(stem);
    const auto again = explicit_model(parse_explicit(write_tra(m), write_lab(m)));
    CHECK(again.transitions == m.transitions);
    CHECK(again.choices == m.choices);
    CHECK(again.labeling == m.labeling);
    CHECK(again.initial_states == m.initial_states);
  }
}

TEST_CASE("initial state defaults to state 0") {
  const auto t = parse_explicit("dtmc\n0 1 1\n1 1 1\n", "#DECLARATION\ngoal\n#END\n1 goal\n");
  const auto m = explicit_model(t);
  CHECK(m.initial_states.indices() == std::vector<std::size_t>{0});
}

TEST_CASE("malformed explicit files") {
  const std::string lab = "#DECLARATION\ninit\n#END\n0 init\n";
  CHECK_THROWS_AS(parse_explicit("pomdp\n0 0 1\n", lab), ParseError);
  CHECK_THROWS_AS(parse_explicit("dtmc\n0 1\n", lab), ParseError);
  CHECK_THROWS_AS(parse_explicit("dtmc\n0 x 1\n", lab), ParseError);
  CHECK_THROWS_AS(parse_explicit("dtmc\n0 0 1\n", "#DECLARATION\ninit\n#END\n0 other\n"), ParseError);
  // Rows must be distributions.
  CHECK_THROWS_AS(explicit_model(parse_explicit("dtmc\n0 0 0.5\n", lab)), Error);
}
