#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace stormlet;
using test::Benchmark;

namespace {

const Benchmark& benchmark(const std::string& name) {
  for (const auto& b : test::benchmarks())
    if (b.name == name) return b;
  throw std::out_of_range(name);
}

template <typename N>
Model<N> load(const std::string& name) {
  return test::load<N>(benchmark(name));
}

Rational exact_value(const Model<Rational>& m, const std::string& prop, SolverMethod method = SolverMethod::Gaussian) {
  const auto v = test::run(m, parse_property(prop), method).value_at_initial();
  REQUIRE_FALSE(v.infinite);
  return v.value;
}

double float_value(const Model<double>& m, const std::string& prop, SolverMethod method) {
  return test::as_double(test::run(m, parse_property(prop), method).value_at_initial());
}

/// Transient distribution of a small CTMC by a Taylor series of exp(Q t)
/// with scaling and squaring.
std::vector<long double> transient(const Model<double>& m, const StateSet& absorbing, double t) {
  const std::size_t n = m.state_count();
  using Dense = std::vector<std::vector<long double>>;
  Dense q(n, std::vector<long double>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    if (absorbing[s]) continue;
    const auto row = m.transitions.row(s);
    for (std::size_t i = 0; i < row.size(); ++i) {
      q[s][row.column(i)] += row.value(i);
      q[s][s] -= row.value(i);
    }
  }
  int squarings = 0;
  long double scale = t;
  while (scale > 0.01L) {
    scale /= 2;
    ++squarings;
  }
  auto mul = [n](const Dense& a, const Dense& b) {
    Dense c(n, std::vector<long double>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
  };
  Dense e(n, std::vector<long double>(n, 0)), term(n, std::vector<long double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) e[i][i] = term[i][i] = 1;
  for (int k = 1; k < 30; ++k) {
    term = mul(term, q);
    for (auto& row : term)
      for (auto& v : row) v *= scale / k;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e[i][j] += term[i][j];
  }
  for (int k = 0; k < squarings; ++k) e = mul(e, e);
  return e[m.initial_states.first()];
}

}  // namespace

TEST_CASE("die: exact solvers") {
  const auto m = load<Rational>("die");
  for (auto method : {SolverMethod::Gaussian, SolverMethod::Elimination, SolverMethod::PolicyIteration,
                      SolverMethod::RationalSearch}) {
    CAPTURE(to_string(method));
    for (const std::string face : {"one", "two", "three", "four", "five", "six"})
      CHECK(exact_value(m, "P=? [F \"" + face + "\"]", method) == Rational(1, 6));
    CHECK(exact_value(m, "R{\"coin_flips\"}=? [F \"done\"]", method) == Rational(11, 3));
  }
  // Three flips along the only path 0 -> 1 -> 3 -> 7 with d=1.
  CHECK(exact_value(m, "P=? [F<=3 \"one\"]") == Rational(1, 8));
  CHECK(exact_value(m, "P=? [F<=2 \"one\"]") == 0);
  CHECK(exact_value(m, "P=? [X s=1]") == Rational(1, 2));
  CHECK(exact_value(m, "P=? [G !\"done\"]") == 0);
  CHECK(exact_value(m, "P=? [!\"two\" U \"one\"]") == Rational(1, 6));
}

TEST_CASE("die: floating-point solvers") {
  const auto m = load<double>("die");
  for (auto method : {SolverMethod::ValueIteration, SolverMethod::IntervalIteration,
                      SolverMethod::OptimisticValueIteration, SolverMethod::Gaussian, SolverMethod::Elimination}) {
    CAPTURE(to_string(method));
    CHECK(float_value(m, "P=? [F \"one\"]", method) == doctest::Approx(1.0 / 6).epsilon(1e-6));
    CHECK(float_value(m, "R=? [F \"done\"]", method) == doctest::Approx(11.0 / 3).epsilon(1e-6));
  }
}

TEST_CASE("thresholds") {
  const auto m = load<Rational>("die");
  CHECK(test::run(m, parse_property("P>0.1 [F \"one\"]"), SolverMethod::Gaussian).holds_initially());
  CHECK_FALSE(test::run(m, parse_property("P>=1/5 [F \"one\"]"), SolverMethod::Gaussian).holds_initially());
  CHECK(test::run(m, parse_property("P<=1/6 [F \"one\"]"), SolverMethod::Gaussian).holds_initially());
  const auto d = load<Rational>("detour");
  // Without a direction the threshold must hold for every scheduler.
  CHECK_FALSE(test::run(d, parse_property("P>0 [F \"win\"]"), SolverMethod::PolicyIteration).holds_initially());
  CHECK(test::run(d, parse_property("P<0.8 [F \"win\"]"), SolverMethod::PolicyIteration).holds_initially());
}

TEST_CASE("herman: self-stabilisation with probability one") {
  const auto m = load<Rational>("herman3");
  const auto r = test::run(m, parse_property("P=? [F \"stable\"]"), SolverMethod::Gaussian);
  for (const auto& v : r.values) CHECK(v.value == 1);
}

TEST_CASE("queue: expected passage times") {
  const auto m = load<Rational>("queue");
  // From level i the time T_i and number of services S_i until level i+1.
  const Rational lambda(2), mu(3);
  Rational t(0), s(0), total_t(0), total_s(0);
  for (int i = 0; i < 3; ++i) {
    t = 1 / lambda + (i ? mu / lambda * t : Rational(0));
    s = i ? mu / lambda * (1 + s) : Rational(0);
    total_t += t;
    total_s += s;
  }
  CHECK(exact_value(m, "R{\"time\"}=? [F \"full\"]") == total_t);
  CHECK(exact_value(m, "R{\"served\"}=? [F \"full\"]") == total_s);
}

TEST_CASE("CTMC time bounds: closed forms") {
  const auto single = load<double>("ctmc_single");
  const auto erlang = load<double>("erlang2");
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    CAPTURE(t);
    const std::string prop = "P=? [F<=" + std::to_string(t) + " \"t\"]";
    CHECK(float_value(single, prop, SolverMethod::ValueIteration) == doctest::Approx(1 - std::exp(-t)).epsilon(1e-6));
    CHECK(float_value(erlang, prop, SolverMethod::ValueIteration) ==
          doctest::Approx(1 - std::exp(-t) * (1 + t)).epsilon(1e-6));
  }
}

TEST_CASE("CTMC time bounds: matrix exponential") {
  const auto m = load<double>("queue");
  const StateSet full = m.labeling.get("full");
  for (double t : {0.25, 0.5, 1.5}) {
    CAPTURE(t);
    const auto row = transient(m, full, t);
    long double oracle = 0;
    for (std::size_t s : full.indices()) oracle += row[s];
    CHECK(float_value(m, "P=? [F<=" + std::to_string(t) + " \"full\"]", SolverMethod::ValueIteration) ==
          doctest::Approx(static_cast<double>(oracle)).epsilon(1e-6));
  }
}

TEST_CASE("nondeterministic models: optima match scheduler enumeration") {
  for (const std::string name : {"two_action", "detour", "grid", "small", "choice"}) {
    const auto m = load<Rational>(name);
    const auto f = load<double>(name);
    REQUIRE(m.state_count() <= 8);
    for (const auto& p : test::properties(benchmark(name))) {
      if (p.path.bound) continue;  // memoryless schedulers do not suffice
      CAPTURE(name);
      CAPTURE(to_string(p));
      const auto oracle = test::best_memoryless(m, p);
      CHECK(test::run(m, p, SolverMethod::PolicyIteration).value_at_initial() == oracle);
      for (auto method : {SolverMethod::ValueIteration, SolverMethod::IntervalIteration,
                          SolverMethod::OptimisticValueIteration, SolverMethod::PolicyIteration}) {
        CAPTURE(to_string(method));
        const double v = test::as_double(test::run(f, p, method).value_at_initial());
        CHECK(test::relative_error(v, test::as_double(oracle)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("schedulers realise the optimum") {
  const auto m = load<Rational>("detour");
  const auto r = test::run(m, parse_property("Pmax=? [F \"win\"]"), SolverMethod::PolicyIteration);
  REQUIRE(r.scheduler);
  const auto induced = apply_scheduler(m, *r.scheduler);
  CHECK(induced.kind == ModelKind::Dtmc);
  CHECK(exact_value(induced, "P=? [F \"win\"]") == r.value_at_initial().value);
  CHECK(r.value_at_initial().value == Rational(7, 9));
}

TEST_CASE("step-bounded optimum on the grid") {
  const auto m = load<Rational>("grid");
  CHECK(exact_value(m, "Pmax=? [F<=4 \"goal\"]", SolverMethod::PolicyIteration) == Rational(512, 625));
  CHECK(exact_value(m, "Pmax=? [F<=0 \"goal\"]", SolverMethod::PolicyIteration) == 0);
}

TEST_CASE("unsupported requests") {
  const auto d = load<Rational>("detour");
  CHECK_THROWS_AS(test::run(d, parse_property("P=? [F \"win\"]"), SolverMethod::PolicyIteration), UnsupportedError);
  CHECK_THROWS_AS(test::run(d, parse_property("Pmax=? [F \"win\"]"), SolverMethod::ValueIteration), UnsupportedError);
  const auto q = load<Rational>("queue");
  CHECK_THROWS_AS(test::run(q, parse_property("P=? [F<=1 \"full\"]"), SolverMethod::Gaussian), UnsupportedError);
  CHECK_THROWS_AS(test::run(load<double>("die"), parse_property("P=? [F<=1.5 \"one\"]"), SolverMethod::Gaussian),
                  ModelError);
  CHECK_THROWS_AS(test::run(load<double>("die"), parse_property("P=? [F \"seven\"]"), SolverMethod::Gaussian),
                  ModelError);
}

TEST_CASE("infinite expected rewards") {
  const auto d = load<Rational>("detour");
  CHECK(test::run(d, parse_property("Rmax=? [F \"end\"]"), SolverMethod::PolicyIteration).value_at_initial().infinite);
  const auto fd = load<double>("detour");
  CHECK(test::run(fd, parse_property("Rmax=? [F \"end\"]"), SolverMethod::IntervalIteration)
            .value_at_initial()
            .infinite);
}
