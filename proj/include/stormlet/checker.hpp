#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stormlet/model.hpp"
#include "stormlet/property.hpp"
#include "stormlet/solvers.hpp"

namespace stormlet {

struct CheckSettings {
  SolverSettings solver;
  std::function<void(const std::string&)> on_warning;
};

template <typename N>
struct CheckResult {
  std::vector<Extended<N>> values;
  /// Per state, whether the threshold holds (threshold properties only).
  std::optional<StateSet> satisfied;
  /// Choice index (relative to the state's first row) per state; produced
  /// by policy iteration on nondeterministic models.
  std::optional<std::vector<std::size_t>> scheduler;
  /// Certified bounds per state from interval and optimistic iteration.
  std::optional<std::vector<N>> lower;
  std::optional<std::vector<N>> upper;
  std::size_t iterations = 0;
  StateSet initial_states;

  /// Value at the first initial state.
  const Extended<N>& value_at_initial() const { return values.at(initial_states.first()); }
  /// True if every initial state satisfies the threshold.
  bool holds_initially() const;
};

/// States satisfying a state formula. Labels are looked up in the model's
/// labeling ("init" defaults to the initial states); identifiers are read
/// from the state valuations.
template <typename N>
StateSet state_formula(const Model<N>& model, const Expr& formula);

/// Direction used for a property on a model: explicit directions on
/// deterministic models are dropped (with a warning); thresholds without a
/// direction on nondeterministic models use the adversarial one (max for
/// < and <=, min for > and >=); queries without one are rejected.
template <typename N>
Direction resolve_direction(const Model<N>& model, const Property& property,
                            const std::function<void(const std::string&)>& on_warning = {});

/// Reward structure a property refers to: the named one, else the
/// unnamed one, else the only one.
template <typename N>
std::string reward_structure_name(const Model<N>& model, const std::optional<std::string>& name);

/// Verifies `property` on every state of `model`. N is double, Rational or
/// RationalFunction; the parametric domain supports unbounded reachability
/// and expected rewards on DTMCs only.
template <typename N>
CheckResult<N> check(const Model<N>& model, const Property& property, const CheckSettings& settings = {});

/// Model with one row per state chosen by `scheduler` (relative indices).
template <typename N>
Model<N> apply_scheduler(const Model<N>& model, const std::vector<std::size_t>& scheduler);

}  // namespace stormlet
