#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stormlet/errors.hpp"
#include "stormlet/number.hpp"
#include "stormlet/sparse_matrix.hpp"
#include "stormlet/state_set.hpp"

namespace stormlet {

enum class ModelKind { Dtmc, Ctmc, Mdp, Ma };

std::string to_string(ModelKind kind);

inline bool is_nondeterministic(ModelKind k) { return k == ModelKind::Mdp || k == ModelKind::Ma; }

/// Maps each state to its consecutive block of matrix rows (choices).
struct ChoiceStructure {
  std::vector<std::size_t> state_offsets{0};
  std::optional<std::vector<std::string>> action_labels;

  static ChoiceStructure identity(std::size_t states) {
    ChoiceStructure c;
    c.state_offsets.resize(states + 1);
    for (std::size_t s = 0; s <= states; ++s) c.state_offsets[s] = s;
    return c;
  }

  std::size_t states() const noexcept { return state_offsets.size() - 1; }
  std::size_t rows() const noexcept { return state_offsets.back(); }
  std::size_t first_row(std::size_t s) const { return state_offsets[s]; }
  std::size_t end_row(std::size_t s) const { return state_offsets[s + 1]; }
  std::size_t choice_count(std::size_t s) const { return end_row(s) - first_row(s); }
  bool is_identity() const {
    for (std::size_t s = 0; s < states(); ++s)
      if (state_offsets[s] != s) return false;
    return rows() == states();
  }

  friend bool operator==(const ChoiceStructure&, const ChoiceStructure&) = default;
};

class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::size_t states) : states_(states) {}

  std::size_t states() const noexcept { return states_; }
  bool has(const std::string& name) const { return labels_.count(name) != 0; }
  const StateSet& get(const std::string& name) const;
  void add(const std::string& name, StateSet states);
  void add_state(const std::string& name, std::size_t state);
  std::vector<std::string> names() const;
  const std::map<std::string, StateSet>& all() const noexcept { return labels_; }

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  std::size_t states_ = 0;
  std::map<std::string, StateSet> labels_;
};

template <typename N>
struct RewardModel {
  std::optional<std::vector<N>> state_rewards;
  /// Indexed by matrix row.
  std::optional<std::vector<N>> action_rewards;

  /// Reward collected when leaving `state` through `row`.
  N total(std::size_t state, std::size_t row) const {
    N r = number_traits<N>::zero();
    if (state_rewards) r = r + (*state_rewards)[state];
    if (action_rewards) r = r + (*action_rewards)[row];
    return r;
  }
};

/// Variable values of every state, kept so properties can refer to
/// variables of a PRISM program.
struct StateValuations {
  std::vector<std::string> variables;
  std::vector<bool> is_bool;
  std::vector<std::vector<std::int64_t>> values;
};

template <typename N>
struct Model {
  ModelKind kind = ModelKind::Dtmc;
  SparseMatrix<N> transitions;
  ChoiceStructure choices;
  /// CTMC: every state. MA: Markovian states (zero elsewhere).
  std::vector<N> exit_rates;
  StateSet markovian_states;
  Labeling labeling;
  std::map<std::string, RewardModel<N>> rewards;
  StateSet initial_states;
  std::optional<StateValuations> valuations;

  std::size_t state_count() const noexcept { return choices.states(); }
  std::size_t row_count() const noexcept { return transitions.rows(); }
  std::size_t transition_count() const noexcept { return transitions.nonzeros(); }
};

/// Result of validate(): empty when the model is well formed.
struct Violation {
  std::string message;
  std::optional<std::size_t> state;
  std::optional<std::size_t> row;
};

namespace detail {

template <typename N>
bool row_sums_to_one(const N& sum) {
  if constexpr (std::is_same_v<N, double>) {
    return std::fabs(sum - 1.0) <= 1e-10;
  } else {
    return number_traits<N>::is_one(sum);
  }
}

template <typename N>
bool in_unit_interval(const N& v) {
  if constexpr (number_traits<N>::ordered) {
    return !(v < number_traits<N>::zero()) && !(number_traits<N>::one() < v);
  } else {
    return true;  // checked when instantiated
  }
}

template <typename N>
bool negative(const N& v) {
  if constexpr (number_traits<N>::ordered) {
    return v < number_traits<N>::zero();
  } else {
    return false;
  }
}

}  // namespace detail

/// Checks all structural and stochastic invariants and reports the first
/// violation.
template <typename N>
std::optional<Violation> validate(const Model<N>& m) {
  const std::size_t n = m.state_count();
  auto fail = [](std::string msg, std::optional<std::size_t> s = {}, std::optional<std::size_t> r = {}) {
    return std::optional<Violation>(Violation{std::move(msg), s, r});
  };
  if (n == 0) return fail("model has no states");
  const auto& offs = m.choices.state_offsets;
  if (offs.front() != 0 || offs.back() != m.transitions.rows())
    return fail("choice offsets do not cover the matrix rows");
  for (std::size_t s = 0; s < n; ++s)
    if (offs[s + 1] <= offs[s]) return fail("state owns no row at state " + std::to_string(s), s);
  if (m.transitions.columns() != n) return fail("matrix column count differs from state count");
  if (m.choices.action_labels && m.choices.action_labels->size() != m.row_count())
    return fail("action label count differs from row count");
  if ((m.kind == ModelKind::Dtmc || m.kind == ModelKind::Ctmc) && !m.choices.is_identity())
    return fail("deterministic model with several choices per state");
  if (m.initial_states.size() != n || m.initial_states.none()) return fail("no initial state");
  if (m.labeling.states() != n) return fail("labeling width differs from state count");
  for (const auto& [name, set] : m.labeling.all())
    if (set.size() != n) return fail("label '" + name + "' has wrong width");

  const bool rate_model = m.kind == ModelKind::Ctmc;
  if (rate_model || m.kind == ModelKind::Ma) {
    if (m.exit_rates.size() != n) return fail("exit rate vector has wrong length");
  }
  if (m.kind == ModelKind::Ma && m.markovian_states.size() != n)
    return fail("Markovian state set has wrong width");

  for (std::size_t s = 0; s < n; ++s) {
    const bool rates = rate_model || (m.kind == ModelKind::Ma && m.markovian_states[s]);
    if (m.kind == ModelKind::Ma && m.markovian_states[s] && m.choices.choice_count(s) != 1)
      return fail("Markovian state with several rows at state " + std::to_string(s), s);
    for (std::size_t r = offs[s]; r < offs[s + 1]; ++r) {
      auto row = m.transitions.row(r);
      if (rates) {
        for (const N& v : row.values())
          if (detail::negative(v))
            return fail("negative rate at state " + std::to_string(s), s, r);
        N sum = row.sum();
        if (!number_traits<N>::equal(sum, m.exit_rates[s]))
          return fail("exit rate differs from row sum at state " + std::to_string(s), s, r);
        if (row.empty()) continue;
        if (number_traits<N>::is_zero(sum) || detail::negative(sum))
          return fail("non-positive exit rate at state " + std::to_string(s), s, r);
      } else {
        for (const N& v : row.values())
          if (!detail::in_unit_interval(v))
            return fail("probability outside [0,1] at state " + std::to_string(s), s, r);
        if (!detail::row_sums_to_one(row.sum()))
          return fail("row sum != 1 at state " + std::to_string(s), s, r);
      }
    }
  }
  for (const auto& [name, rm] : m.rewards) {
    if (rm.state_rewards) {
      if (rm.state_rewards->size() != n) return fail("reward '" + name + "' has wrong length");
      for (std::size_t s = 0; s < n; ++s)
        if (detail::negative((*rm.state_rewards)[s]))
          return fail("negative state reward in '" + name + "' at state " + std::to_string(s), s);
    }
    if (rm.action_rewards) {
      if (rm.action_rewards->size() != m.row_count())
        return fail("reward '" + name + "' has wrong length");
      for (std::size_t r = 0; r < m.row_count(); ++r)
        if (detail::negative((*rm.action_rewards)[r]))
          return fail("negative action reward in '" + name + "' at row " + std::to_string(r), {}, r);
    }
  }
  return std::nullopt;
}

/// Each non-absorbing row divided by its exit rate; absorbing states get a
/// probability-1 self-loop. Rewards are carried over unscaled.
template <typename N>
Model<N> embedded_dtmc(const Model<N>& ctmc) {
  if (ctmc.kind != ModelKind::Ctmc) throw Error("embedded_dtmc expects a CTMC");
  const std::size_t n = ctmc.state_count();
  std::vector<Triplet<N>> entries;
  for (std::size_t s = 0; s < n; ++s) {
    auto row = ctmc.transitions.row(s);
    if (row.empty() || number_traits<N>::is_zero(ctmc.exit_rates[s])) {
      entries.push_back({s, s, number_traits<N>::one()});
      continue;
    }
    for (std::size_t i = 0; i < row.size(); ++i)
      entries.push_back({s, row.column(i), N(row.value(i) / ctmc.exit_rates[s])});
  }
  Model<N> out = ctmc;
  out.kind = ModelKind::Dtmc;
  out.transitions = from_triplets(n, std::move(entries));
  out.exit_rates.clear();
  return out;
}

/// DTMC with P = I + R/rate - diag(E)/rate.
template <typename N>
Model<N> uniformize(const Model<N>& ctmc, const N& rate) {
  if (ctmc.kind != ModelKind::Ctmc) throw Error("uniformize expects a CTMC");
  const std::size_t n = ctmc.state_count();
  if constexpr (number_traits<N>::ordered) {
    for (std::size_t s = 0; s < n; ++s)
      if (rate < ctmc.exit_rates[s])
        throw Error("uniformization rate below the exit rate of state " + std::to_string(s));
    if (!(number_traits<N>::zero() < rate) && n > 0) {
      bool all_absorbing = true;
      for (const auto& e : ctmc.exit_rates) all_absorbing = all_absorbing && number_traits<N>::is_zero(e);
      if (!all_absorbing) throw Error("uniformization rate must be positive");
    }
  }
  std::vector<Triplet<N>> entries;
  for (std::size_t s = 0; s < n; ++s) {
    auto row = ctmc.transitions.row(s);
    if (row.empty()) {
      entries.push_back({s, s, number_traits<N>::one()});
      continue;
    }
    for (std::size_t i = 0; i < row.size(); ++i)
      entries.push_back({s, row.column(i), N(row.value(i) / rate)});
    entries.push_back({s, s, N(number_traits<N>::one() - ctmc.exit_rates[s] / rate)});
  }
  Model<N> out = ctmc;
  out.kind = ModelKind::Dtmc;
  out.transitions = from_triplets(n, std::move(entries));
  out.exit_rates.clear();
  return out;
}

/// Untimed MDP of a Markov automaton: every Markovian state keeps its single
/// row, normalized to the embedded distribution.
template <typename N>
Model<N> induced_untimed_mdp(const Model<N>& ma) {
  if (ma.kind != ModelKind::Ma) throw Error("induced_untimed_mdp expects a Markov automaton");
  std::vector<Triplet<N>> entries;
  for (std::size_t s = 0; s < ma.state_count(); ++s) {
    for (std::size_t r = ma.choices.first_row(s); r < ma.choices.end_row(s); ++r) {
      auto row = ma.transitions.row(r);
      const bool markovian = ma.markovian_states[s];
      if (markovian && row.empty()) {
        entries.push_back({r, s, number_traits<N>::one()});
        continue;
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        N v = markovian ? N(row.value(i) / ma.exit_rates[s]) : row.value(i);
        entries.push_back({r, row.column(i), std::move(v)});
      }
    }
  }
  Model<N> out = ma;
  out.kind = ModelKind::Mdp;
  out.transitions = from_triplets(ma.row_count(), ma.state_count(), std::move(entries));
  out.exit_rates.clear();
  out.markovian_states = StateSet();
  return out;
}

/// Converts every number of a model into another domain.
template <typename M, typename N, typename F>
Model<M> convert_model(const Model<N>& m, F&& f) {
  Model<M> out;
  out.kind = m.kind;
  out.transitions = m.transitions.template map<M>(f);
  out.choices = m.choices;
  for (const auto& e : m.exit_rates) out.exit_rates.push_back(f(e));
  out.markovian_states = m.markovian_states;
  out.labeling = m.labeling;
  for (const auto& [name, rm] : m.rewards) {
    RewardModel<M> r;
    if (rm.state_rewards) {
      r.state_rewards.emplace();
      for (const auto& v : *rm.state_rewards) r.state_rewards->push_back(f(v));
    }
    if (rm.action_rewards) {
      r.action_rewards.emplace();
      for (const auto& v : *rm.action_rewards) r.action_rewards->push_back(f(v));
    }
    out.rewards.emplace(name, std::move(r));
  }
  out.initial_states = m.initial_states;
  out.valuations = m.valuations;
  return out;
}

inline Model<double> to_float_model(const Model<Rational>& m) {
  return convert_model<double>(m, [](const Rational& q) { return q.get_d(); });
}

}  // namespace stormlet
