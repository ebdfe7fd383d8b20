#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stormlet/errors.hpp"
#include "stormlet/number.hpp"
#include "stormlet/property.hpp"
#include "stormlet/rational_function.hpp"
#include "stormlet/sparse_matrix.hpp"

namespace stormlet {

enum class SolverMethod {
  ValueIteration,
  IntervalIteration,
  OptimisticValueIteration,
  Gaussian,
  Elimination,
  PolicyIteration,
  RationalSearch,
};

std::string to_string(SolverMethod m);

struct SolverSettings {
  SolverMethod method = SolverMethod::ValueIteration;
  Rational precision{1, 1000000};
  bool relative = true;
  bool gauss_seidel = false;
  std::size_t max_iterations = 1000000;
  /// Linear solver used to evaluate policies in policy iteration.
  SolverMethod policy_evaluation = SolverMethod::Gaussian;
  const Deadline* deadline = nullptr;
};

/// x[s] = opt over rows r of group s of (sum_t A[r][t] x[t] + b[r]).
///
/// Probability mass missing from a row (1 - row sum) leads to a value-0
/// exit. A system with one row per group is a plain linear fixpoint system
/// x = A x + b. Lower/upper carry initial bounds for interval iteration;
/// they default to 0 and 1.
template <typename N>
struct EquationSystem {
  SparseMatrix<N> matrix;
  std::vector<std::size_t> row_groups{0};
  std::vector<N> b;
  Direction direction = Direction::None;
  std::optional<std::vector<N>> lower;
  std::optional<std::vector<N>> upper;

  std::size_t size() const noexcept { return row_groups.size() - 1; }
  bool deterministic() const noexcept { return matrix.rows() == size(); }
};

/// Linear system x = A x + b with one row per unknown.
template <typename N>
EquationSystem<N> linear_system(SparseMatrix<N> a, std::vector<N> b);

template <typename N>
struct SolverOutcome {
  std::vector<N> values;
  std::optional<std::vector<N>> lower;
  std::optional<std::vector<N>> upper;
  std::size_t iterations = 0;
  /// Chosen row per group, relative to the group's first row.
  std::optional<std::vector<std::size_t>> policy;
};

template <typename N>
SolverOutcome<N> solve(const EquationSystem<N>& system, const SolverSettings& settings);

template <typename N>
SolverOutcome<N> value_iteration(const EquationSystem<N>& system, const SolverSettings& settings);
template <typename N>
SolverOutcome<N> interval_iteration(const EquationSystem<N>& system, const SolverSettings& settings);
template <typename N>
SolverOutcome<N> optimistic_value_iteration(const EquationSystem<N>& system, const SolverSettings& settings);
/// Sparse Gaussian elimination of (I - A) x = b; deterministic systems only.
template <typename N>
SolverOutcome<N> gaussian_elimination(const EquationSystem<N>& system);
/// State elimination in minimum in-degree x out-degree order (ties by
/// index). When `wanted` is given only those values are back-substituted;
/// the others are left zero.
template <typename N>
SolverOutcome<N> state_elimination(const EquationSystem<N>& system,
                                   const std::vector<std::size_t>* wanted = nullptr);
template <typename N>
SolverOutcome<N> policy_iteration(const EquationSystem<N>& system, const SolverSettings& settings);

/// Exact solution of a deterministic rational system: approximate with value
/// iteration at precision eps, round each value to the simplest rational
/// within eps, and verify x = A x + b exactly; eps is squared until the
/// check passes. Double precision is used down to 1e-14, then GMP floats.
SolverOutcome<Rational> rational_search(const EquationSystem<Rational>& system, const SolverSettings& settings);

/// Simplest rational (smallest denominator, then numerator) in [lo, hi].
Rational simplest_rational_between(const Rational& lo, const Rational& hi);

/// One application of the Bellman operator; returns the chosen rows too.
template <typename N>
std::vector<N> bellman_step(const EquationSystem<N>& system, const std::vector<N>& x,
                            std::vector<std::size_t>* choice = nullptr);

/// Sound upper bound on the solution of a reward system (b >= 0, every
/// policy relevant for the direction leaves with probability one). Uses
/// attractor layers towards the exit: with L layers and q the smallest
/// probability of leaving within L steps, the expected number of steps is
/// at most L / q and the value at most max(b) * L / q.
template <typename N>
N reward_upper_bound(const EquationSystem<N>& system);

}  // namespace stormlet
