#include "stormlet/graph.hpp"

#include <algorithm>
#include <limits>

namespace stormlet {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

}  // namespace

Graph make_graph(Adjacency rows, std::vector<std::size_t> state_offsets) {
  Graph g;
  g.rows = std::move(rows);
  g.state_offsets = std::move(state_offsets);
  const std::size_t n = g.states();
  g.row_state.resize(g.rows.size());
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = g.state_offsets[s]; r < g.state_offsets[s + 1]; ++r) g.row_state[r] = s;

  std::vector<std::vector<index_t>> pred(n);
  for (std::size_t r = 0; r < g.rows.size(); ++r)
    for (index_t t : g.rows[r]) pred[t].push_back(g.row_state[r]);
  g.predecessors.offsets.assign(1, 0);
  for (auto& p : pred) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    g.predecessors.targets.insert(g.predecessors.targets.end(), p.begin(), p.end());
    g.predecessors.offsets.push_back(g.predecessors.targets.size());
  }
  return g;
}

StateSet backward_reach(const Graph& g, const StateSet& through, const StateSet& targets) {
  StateSet seen = targets;
  std::vector<std::size_t> stack = targets.indices();
  while (!stack.empty()) {
    const std::size_t t = stack.back();
    stack.pop_back();
    for (index_t s : g.predecessors[t]) {
      if (seen[s] || !through[s]) continue;
      seen.set(s);
      stack.push_back(s);
    }
  }
  return seen;
}

Prob01 prob01_deterministic(const Graph& g, const StateSet& phi1, const StateSet& phi2) {
  const StateSet maybe_path = phi1 - phi2;
  Prob01 out;
  out.prob0 = ~backward_reach(g, maybe_path, phi2);
  out.prob1 = ~backward_reach(g, maybe_path, out.prob0);
  out.rows.assign(g.state_offsets.begin(), g.state_offsets.end() - 1);
  return out;
}

Prob01 prob01_max(const Graph& g, const StateSet& phi1, const StateSet& phi2) {
  const StateSet open = phi1 - phi2;
  Prob01 out;
  out.prob0 = ~backward_reach(g, open, phi2);
  out.rows.assign(g.state_offsets.begin(), g.state_offsets.end() - 1);

  // Greatest fixpoint over U of the states that can reach phi2 inside U
  // using only rows that never leave U.
  StateSet u = ~out.prob0;
  for (;;) {
    StateSet r = phi2;
    std::vector<std::size_t> stack = phi2.indices();
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      for (index_t s : g.predecessors[t]) {
        if (r[s] || !open[s] || !u[s]) continue;
        for (std::size_t row = g.state_offsets[s]; row < g.state_offsets[s + 1]; ++row) {
          bool inside = true, progress = false;
          for (index_t x : g.rows[row]) {
            inside = inside && u[x];
            progress = progress || r[x];
          }
          if (inside && progress) {
            r.set(s);
            out.rows[s] = row;
            stack.push_back(s);
            break;
          }
        }
      }
    }
    if (r == u) break;
    u = r;
  }
  out.prob1 = u;
  return out;
}

Prob01 prob01_min(const Graph& g, const StateSet& phi1, const StateSet& phi2) {
  const std::size_t n = g.states();
  const StateSet open = phi1 - phi2;
  Prob01 out;
  out.rows.assign(g.state_offsets.begin(), g.state_offsets.end() - 1);

  // Least fixpoint: states where every row has a successor already inside.
  StateSet forced = phi2;
  std::vector<bool> row_hit(g.row_count(), false);
  std::vector<std::size_t> missing(n);
  for (std::size_t s = 0; s < n; ++s) missing[s] = g.state_offsets[s + 1] - g.state_offsets[s];
  std::vector<std::size_t> stack = phi2.indices();
  while (!stack.empty()) {
    const std::size_t t = stack.back();
    stack.pop_back();
    for (index_t s : g.predecessors[t]) {
      if (forced[s] || !open[s]) continue;
      for (std::size_t row = g.state_offsets[s]; row < g.state_offsets[s + 1]; ++row) {
        if (row_hit[row]) continue;
        const auto succ = g.rows[row];
        if (std::find(succ.begin(), succ.end(), static_cast<index_t>(t)) == succ.end()) continue;
        row_hit[row] = true;
        --missing[s];
      }
      if (missing[s] == 0) {
        forced.set(s);
        stack.push_back(s);
      }
    }
  }
  out.prob0 = ~forced;
  for (std::size_t s = 0; s < n; ++s) {
    if (!out.prob0[s]) continue;
    for (std::size_t row = g.state_offsets[s]; row < g.state_offsets[s + 1]; ++row) {
      if (!row_hit[row]) {
        out.rows[s] = row;
        break;
      }
    }
  }
  out.prob1 = ~backward_reach(g, open, out.prob0);
  return out;
}

std::pair<std::vector<std::size_t>, std::size_t> strongly_connected_components(
    const Graph& g, const StateSet& states, const std::vector<bool>& allowed_rows) {
  const std::size_t n = g.states();
  std::vector<std::size_t> component(n, npos), index(n, npos), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, components = 0;

  // Iterative Tarjan; a frame walks the successors of all allowed rows.
  struct Frame {
    std::size_t state, row, pos;
  };
  auto row_ok = [&](std::size_t r) { return allowed_rows.empty() || allowed_rows[r]; };
  for (std::size_t root = 0; root < n; ++root) {
    if (!states[root] || index[root] != npos) continue;
    std::vector<Frame> frames{{root, g.state_offsets[root], 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const std::size_t s = f.state;
      bool descended = false;
      while (f.row < g.state_offsets[s + 1]) {
        if (!row_ok(f.row)) {
          ++f.row;
          f.pos = 0;
          continue;
        }
        const auto succ = g.rows[f.row];
        if (f.pos >= succ.size()) {
          ++f.row;
          f.pos = 0;
          continue;
        }
        const std::size_t t = succ[f.pos++];
        if (!states[t]) continue;
        if (index[t] == npos) {
          index[t] = low[t] = counter++;
          stack.push_back(t);
          on_stack[t] = true;
          frames.push_back({t, g.state_offsets[t], 0});
          descended = true;
          break;
        }
        if (on_stack[t]) low[s] = std::min(low[s], index[t]);
      }
      if (descended) continue;
      if (low[s] == index[s]) {
        for (;;) {
          const std::size_t x = stack.back();
          stack.pop_back();
          on_stack[x] = false;
          component[x] = components;
          if (x == s) break;
        }
        ++components;
      }
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().state;
        low[parent] = std::min(low[parent], low[s]);
      }
    }
  }
  return {component, components};
}

std::vector<EndComponent> mec_decomposition(const Graph& g, const StateSet& states,
                                            const std::vector<bool>& allowed_rows) {
  const std::size_t n = g.states();
  StateSet remaining = states;
  std::vector<bool> allowed(g.row_count(), false);
  for (std::size_t r = 0; r < g.row_count(); ++r) allowed[r] = allowed_rows.empty() || allowed_rows[r];

  std::vector<std::size_t> component;
  for (bool changed = true; changed;) {
    changed = false;
    // Rows must stay inside the remaining states.
    for (std::size_t r = 0; r < g.row_count(); ++r) {
      if (!allowed[r]) continue;
      bool inside = remaining[g.row_state[r]];
      for (index_t t : g.rows[r]) inside = inside && remaining[t];
      if (!inside) allowed[r] = false;
    }
    component = strongly_connected_components(g, remaining, allowed).first;
    for (std::size_t r = 0; r < g.row_count(); ++r) {
      if (!allowed[r]) continue;
      const std::size_t c = component[g.row_state[r]];
      for (index_t t : g.rows[r]) {
        if (component[t] != c) {
          allowed[r] = false;
          changed = true;
          break;
        }
      }
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (!remaining[s]) continue;
      bool any = false;
      for (std::size_t r = g.state_offsets[s]; r < g.state_offsets[s + 1] && !any; ++r) any = allowed[r];
      if (!any) {
        remaining.reset(s);
        changed = true;
      }
    }
  }

  std::vector<EndComponent> out;
  std::vector<std::size_t> slot(n, npos);
  for (std::size_t s = 0; s < n; ++s) {
    if (!remaining[s]) continue;
    const std::size_t c = component[s];
    if (slot[c] == npos) {
      slot[c] = out.size();
      out.emplace_back();
    }
    auto& ec = out[slot[c]];
    ec.states.push_back(s);
    for (std::size_t r = g.state_offsets[s]; r < g.state_offsets[s + 1]; ++r)
      if (allowed[r]) ec.rows.push_back(r);
  }
  return out;
}

}  // namespace stormlet
