#include <doctest.h>

#include <random>

#include "stormlet/graph.hpp"
#include "stormlet/solvers.hpp"
#include "support.hpp"

using namespace stormlet;

namespace {

/// Random system where every row leaves with probability at least 1/10,
/// so every policy has a unique solution.
EquationSystem<Rational> random_system(std::mt19937& rng, std::size_t n, std::size_t choices, Direction dir) {
  std::uniform_int_distribution<int> weight(0, 6), coin(0, 2);
  std::vector<Triplet<Rational>> entries;
  EquationSystem<Rational> sys;
  sys.direction = dir;
  sys.row_groups = {0};
  std::size_t row = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t c = 0; c < choices; ++c, ++row) {
      std::vector<int> w(n + 1);
      int total = 1;
      for (std::size_t t = 0; t < n; ++t) {
        w[t] = coin(rng) ? 0 : weight(rng);
        total += w[t];
      }
      w[n] = 1 + weight(rng);  // exit mass
      total += w[n] - 1;
      const Rational scale = test::frac(9, 10 * total);
      for (std::size_t t = 0; t < n; ++t)
        if (w[t]) entries.push_back({row, t, w[t] * scale});
      sys.b.push_back(test::frac(weight(rng), 60));
    }
    sys.row_groups.push_back(row);
  }
  sys.matrix = from_triplets(row, n, std::move(entries));
  return sys;
}

/// x = A x + b, checked by substitution.
bool solves(const EquationSystem<Rational>& sys, const std::vector<Rational>& x) {
  for (std::size_t r = 0; r < sys.matrix.rows(); ++r) {
    Rational v = sys.b[r];
    const auto row = sys.matrix.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) v += row.value(i) * x[row.column(i)];
    if (v != x[r]) return false;
  }
  return true;
}

/// Restriction of a nondeterministic system to one row per group.
EquationSystem<Rational> under_policy(const EquationSystem<Rational>& sys, const std::vector<std::size_t>& choice) {
  std::vector<Triplet<Rational>> entries;
  std::vector<Rational> b;
  for (std::size_t s = 0; s < sys.size(); ++s) {
    const std::size_t r = sys.row_groups[s] + choice[s];
    const auto row = sys.matrix.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) entries.push_back({s, row.column(i), row.value(i)});
    b.push_back(sys.b[r]);
  }
  return linear_system(from_triplets(sys.size(), sys.size(), std::move(entries)), std::move(b));
}

/// Optimum per state over all memoryless deterministic policies.
std::vector<Rational> enumerate_policies(const EquationSystem<Rational>& sys) {
  const std::size_t n = sys.size();
  std::vector<std::size_t> choice(n, 0);
  std::optional<std::vector<Rational>> best;
  for (;;) {
    const auto x = gaussian_elimination(under_policy(sys, choice)).values;
    if (!best) best = x;
    for (std::size_t s = 0; s < n; ++s)
      if (sys.direction == Direction::Max ? x[s] > (*best)[s] : x[s] < (*best)[s]) (*best)[s] = x[s];
    std::size_t s = 0;
    while (s < n && ++choice[s] == sys.row_groups[s + 1] - sys.row_groups[s]) choice[s++] = 0;
    if (s == n) return *best;
  }
}

EquationSystem<double> to_double(const EquationSystem<Rational>& sys) {
  EquationSystem<double> out;
  out.matrix = sys.matrix.map<double>([](const Rational& q) { return q.get_d(); });
  out.row_groups = sys.row_groups;
  for (const auto& v : sys.b) out.b.push_back(v.get_d());
  out.direction = sys.direction;
  return out;
}

/// 20 states, each staying with probability 1/2 and moving on otherwise;
/// the last state exits with value 1, so every value is exactly 1.
EquationSystem<double> slow_chain() {
  std::vector<Triplet<double>> e;
  std::vector<double> b(20, 0.0);
  for (std::size_t i = 0; i < 20; ++i) {
    e.push_back({i, i, 0.5});
    if (i < 19) e.push_back({i, i + 1, 0.5});
  }
  b[19] = 0.5;
  return linear_system(from_triplets<double>(20, 20, e), b);
}

SolverSettings with(SolverMethod m) {
  SolverSettings s;
  s.method = m;
  return s;
}

}  // namespace

TEST_CASE("exact linear solvers agree and satisfy the equations") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sys = random_system(rng, 1 + trial % 10, 1, Direction::None);
    const auto g = gaussian_elimination(sys).values;
    CHECK(solves(sys, g));
    CHECK(state_elimination(sys).values == g);
    const auto rs = rational_search(sys, with(SolverMethod::RationalSearch)).values;
    CHECK(rs == g);
  }
}

TEST_CASE("state elimination back-substitutes only wanted values") {
  std::mt19937 rng(5);
  const auto sys = random_system(rng, 8, 1, Direction::None);
  const std::vector<std::size_t> wanted{2, 5};
  const auto part = state_elimination(sys, &wanted).values;
  const auto full = gaussian_elimination(sys).values;
  CHECK(part[2] == full[2]);
  CHECK(part[5] == full[5]);
}

TEST_CASE("policy iteration matches policy enumeration") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Direction dir = trial % 2 ? Direction::Max : Direction::Min;
    const auto sys = random_system(rng, 2 + trial % 5, 2 + trial % 2, dir);
    const auto oracle = enumerate_policies(sys);
    const auto pi = policy_iteration(sys, with(SolverMethod::PolicyIteration));
    CHECK(pi.values == oracle);
    REQUIRE(pi.policy);
    CHECK(gaussian_elimination(under_policy(sys, *pi.policy)).values == oracle);
    // The optimum is a fixpoint of the Bellman operator.
    CHECK(bellman_step(sys, oracle) == oracle);

    const auto fsys = to_double(sys);
    for (auto m : {SolverMethod::ValueIteration, SolverMethod::IntervalIteration,
                   SolverMethod::OptimisticValueIteration, SolverMethod::PolicyIteration}) {
      SolverSettings s = with(m);
      s.precision = Rational(1, 100000000);
      const auto out = solve(fsys, s);
      for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(out.values[i] == doctest::Approx(oracle[i].get_d()).epsilon(1e-6));
    }
  }
}

TEST_CASE("sound methods bracket the exact values") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = random_system(rng, 3 + trial % 6, 1 + trial % 3, trial % 2 ? Direction::Max : Direction::Min);
    const auto exact = policy_iteration(sys, with(SolverMethod::PolicyIteration)).values;
    for (auto m : {SolverMethod::IntervalIteration, SolverMethod::OptimisticValueIteration}) {
      const auto out = solve(to_double(sys), with(m));
      REQUIRE(out.lower);
      REQUIRE(out.upper);
      for (std::size_t i = 0; i < exact.size(); ++i) {
        // Sound up to rounding of the floating-point iterates.
        const double slack = 1e-12 * exact[i].get_d();
        CHECK((*out.lower)[i] <= exact[i].get_d() + slack);
        CHECK(exact[i].get_d() - slack <= (*out.upper)[i]);
      }
    }
  }
}

TEST_CASE("slow chain: value iteration stops early, sound methods do not") {
  const auto sys = slow_chain();
  const auto vi = solve(sys, with(SolverMethod::ValueIteration));
  double worst = 0;
  for (double v : vi.values) worst = std::max(worst, std::fabs(v - 1.0));
  CHECK(worst > 1e-6);
  for (auto m : {SolverMethod::IntervalIteration, SolverMethod::OptimisticValueIteration}) {
    const auto out = solve(sys, with(m));
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK((*out.lower)[i] <= 1.0);
      CHECK((*out.upper)[i] >= 1.0);
      CHECK((*out.upper)[i] - (*out.lower)[i] <= 2e-6);
    }
  }
}

TEST_CASE("iteration cap") {
  SolverSettings s = with(SolverMethod::ValueIteration);
  s.max_iterations = 5;
  CHECK_THROWS_AS(solve(slow_chain(), s), SolverError);
  Deadline expired = Deadline::after(std::chrono::milliseconds(-1));
  s.max_iterations = 1000000;
  s.deadline = &expired;
  CHECK_THROWS_AS(solve(slow_chain(), s), TimeoutError);
}

TEST_CASE("reward upper bound dominates the solution") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = random_system(rng, 2 + trial % 7, 1 + trial % 2, Direction::Max);
    const auto exact = policy_iteration(sys, with(SolverMethod::PolicyIteration)).values;
    const Rational bound = reward_upper_bound(sys);
    for (const auto& v : exact) CHECK(v <= bound);
  }
}

TEST_CASE("qualitative reachability") {
  // 0 -> {1, 2}, 1 -> 1, 2 -> 3 (target), 3 -> 3.
  Adjacency rows;
  rows.offsets = {0, 2, 3, 4, 5};
  rows.targets = {1, 2, 1, 3, 3};
  const Graph g = make_graph(rows, {0, 1, 2, 3, 4});
  StateSet all(4), target(4);
  for (std::size_t s = 0; s < 4; ++s) all.set(s);
  target.set(3);
  const Prob01 q = prob01_deterministic(g, all, target);
  CHECK(q.prob0.indices() == std::vector<std::size_t>{1});
  CHECK(q.prob1.indices() == std::vector<std::size_t>{2, 3});
}

TEST_CASE("qualitative reachability under schedulers") {
  // State 0: row 0 -> 0 (self-loop), row 1 -> 1. State 1: -> 2 or -> 0. State 2 target.
  Adjacency rows;
  rows.offsets = {0, 1, 2, 3, 4, 5};
  rows.targets = {0, 1, 2, 0, 2};
  const Graph g = make_graph(rows, {0, 2, 4, 5});
  StateSet all(3), target(3);
  for (std::size_t s = 0; s < 3; ++s) all.set(s);
  target.set(2);
  const Prob01 mx = prob01_max(g, all, target);
  CHECK(mx.prob1.indices() == std::vector<std::size_t>{0, 1, 2});
  const Prob01 mn = prob01_min(g, all, target);
  CHECK(mn.prob0.indices() == std::vector<std::size_t>{0, 1});
  StateSet non_target(3);
  non_target.set(0);
  non_target.set(1);
  const auto mecs = mec_decomposition(g, non_target);
  REQUIRE(mecs.size() == 1);
  CHECK(mecs[0].states == std::vector<std::size_t>{0, 1});
  CHECK(mecs[0].rows == std::vector<std::size_t>{0, 1, 3});
}
