#include <doctest.h>

#include "stormlet/bisimulation.hpp"
#include "support.hpp"

using namespace stormlet;

namespace {

SolverMethod exact_method(const Model<Rational>& m) {
  return is_nondeterministic(m.kind) ? SolverMethod::PolicyIteration : SolverMethod::Gaussian;
}

}  // namespace

TEST_CASE("quotients preserve values exactly") {
  for (const auto& b : test::benchmarks()) {
    const auto m = test::load<Rational>(b);
    for (const auto& p : test::properties(b)) {
      if (test::is_time_bounded(m.kind, p)) continue;
      CAPTURE(b.name);
      CAPTURE(to_string(p));
      const auto mini = minimize_for(m, p);
      CHECK(mini.model.state_count() <= m.state_count());
      const auto original = test::run(m, p, exact_method(m));
      const auto reduced = test::run(mini.model, mini.property, exact_method(m));
      for (std::size_t s = 0; s < m.state_count(); ++s) CHECK(original.values[s] == reduced.values[mini.partition.block[s]]);
    }
  }
}

TEST_CASE("quotient sizes") {
  const auto die = test::load<Rational>(test::benchmarks()[0]);
  const auto mini = minimize_for(die, parse_property("P=? [F \"one\"]"));
  CHECK(mini.model.state_count() < 13);
  CHECK_FALSE(validate(mini.model).has_value());
}

TEST_CASE("partition invariants") {
  for (const auto& b : test::benchmarks()) {
    const auto m = test::load<Rational>(b);
    const auto labels = m.labeling.names();
    const Partition p = refine(m, initial_partition(m, labels, {}));
    CAPTURE(b.name);
    // Blocks respect every label.
    for (const auto& l : labels)
      for (std::size_t s = 0; s < m.state_count(); ++s)
        for (std::size_t t = s + 1; t < m.state_count(); ++t)
          if (p.block[s] == p.block[t]) CHECK(m.labeling.get(l)[s] == m.labeling.get(l)[t]);
    // Refining a stable partition changes nothing.
    CHECK(refine(m, p).block == p.block);
    // Double and exact models give the same partition.
    const auto f = test::load<double>(b);
    CHECK(refine(f, initial_partition(f, labels, {})).block == p.block);
  }
}

TEST_CASE("symmetric states merge") {
  // 0 -> 1 or 2 with equal probability; 1 and 2 both go to 3.
  const auto t = parse_explicit("dtmc\n0 1 0.5\n0 2 0.5\n1 3 1\n2 3 1\n3 3 1\n", "#DECLARATION\ngoal\n#END\n3 goal\n");
  const auto m = explicit_model(t);
  const auto mini = minimize_for(m, parse_property("P=? [F \"goal\"]"));
  CHECK(mini.partition.block[1] == mini.partition.block[2]);
  CHECK(mini.model.state_count() == 3);
}
