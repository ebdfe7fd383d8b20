#pragma once

#include <vector>

#include "stormlet/model.hpp"
#include "stormlet/sparse_matrix.hpp"
#include "stormlet/state_set.hpp"

namespace stormlet {

/// Non-zero structure of a model: rows grouped by state plus the reverse
/// state-to-state edges. Qualitative algorithms never look at values.
struct Graph {
  Adjacency rows;                        // row -> successor states
  std::vector<std::size_t> state_offsets;  // state -> first row
  std::vector<std::size_t> row_state;    // row -> owning state
  Adjacency predecessors;                // state -> predecessor states (ascending, unique)

  std::size_t states() const noexcept { return state_offsets.size() - 1; }
  std::size_t row_count() const noexcept { return rows.size(); }
};

Graph make_graph(Adjacency rows, std::vector<std::size_t> state_offsets);

template <typename N>
Graph make_graph(const Model<N>& m) {
  return make_graph(pattern(m.transitions), m.choices.state_offsets);
}

/// Qualitative result of `phi1 U phi2`. For nondeterministic models the
/// `rows` vector gives, per state, a row (absolute index) realising the
/// qualitative optimum in P0 or P1 states where it matters, or the first row.
struct Prob01 {
  StateSet prob0;
  StateSet prob1;
  std::vector<std::size_t> rows;
};

/// Deterministic models (the single row of every state).
Prob01 prob01_deterministic(const Graph& g, const StateSet& phi1, const StateSet& phi2);

/// Maximizing: prob0 = states with maximal probability 0, prob1 = states
/// where some scheduler reaches phi2 almost surely.
Prob01 prob01_max(const Graph& g, const StateSet& phi1, const StateSet& phi2);

/// Minimizing: prob0 = states where some scheduler avoids phi2 almost surely
/// (minimal probability 0), prob1 = states where every scheduler reaches it.
Prob01 prob01_min(const Graph& g, const StateSet& phi1, const StateSet& phi2);

/// States with a path to `targets` whose intermediate states lie in `through`
/// (targets included).
StateSet backward_reach(const Graph& g, const StateSet& through, const StateSet& targets);

/// A maximal end component: closed under `rows` and strongly connected.
struct EndComponent {
  std::vector<std::size_t> states;
  std::vector<std::size_t> rows;
};

/// MECs of the sub-MDP induced by `states`, using only rows with
/// `allowed_rows[r]` (all rows when empty). Ordered by smallest state.
std::vector<EndComponent> mec_decomposition(const Graph& g, const StateSet& states,
                                            const std::vector<bool>& allowed_rows = {});

/// Strongly connected components of the graph restricted to `states` and
/// `allowed_rows`; returns a component id per state (unused states get
/// npos) and the component count.
std::pair<std::vector<std::size_t>, std::size_t> strongly_connected_components(
    const Graph& g, const StateSet& states, const std::vector<bool>& allowed_rows);

}  // namespace stormlet
