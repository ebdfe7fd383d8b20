#include "stormlet/checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stormlet/graph.hpp"

namespace stormlet {

namespace {

template <typename N>
using T = number_traits<N>;

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

void warn(const std::function<void(const std::string&)>& sink, const std::string& message) {
  if (sink) sink(message);
}

/// Untimed view: embedded DTMC of a CTMC, induced MDP of a Markov automaton.
template <typename N>
Model<N> discrete_view(const Model<N>& m) {
  if (m.kind == ModelKind::Ctmc) return embedded_dtmc(m);
  if (m.kind == ModelKind::Ma) return induced_untimed_mdp(m);
  return m;
}

template <typename N>
N successor_mass(const SparseMatrix<N>& matrix, std::size_t r, const StateSet& into) {
  N sum = T<N>::zero();
  auto row = matrix.row(r);
  for (std::size_t i = 0; i < row.size(); ++i)
    if (into[row.column(i)]) sum = sum + row.value(i);
  return sum;
}

/// Picks the better of two values for a direction; the parametric domain
/// only ever sees one row per state.
template <typename N>
bool improves(Direction d, const N& candidate, const N& current) {
  if constexpr (T<N>::ordered) {
    return d == Direction::Min ? candidate < current : current < candidate;
  } else {
    (void)d;
    (void)candidate;
    (void)current;
    throw UnsupportedError("nondeterministic choices are not supported in the parametric domain");
  }
}

/// Equation system over the maybe states. Rows not in `allowed` are left
/// out; each end component in `ecs` becomes a single unknown whose rows are
/// the member rows leaving it.
template <typename N>
struct Reduced {
  EquationSystem<N> system;
  std::vector<std::size_t> unknown;     // state -> unknown (npos outside maybe)
  std::vector<std::size_t> row_origin;  // system row -> model row (npos for filler rows)
  std::vector<std::size_t> ec_of_unknown;
};

template <typename N>
Reduced<N> reduce(const Model<N>& m, const StateSet& maybe, const std::vector<N>& row_b,
                  const std::vector<bool>& allowed, const std::vector<EndComponent>& ecs, Direction d) {
  const std::size_t n = m.state_count();
  Reduced<N> red;
  red.unknown.assign(n, npos);
  std::vector<std::size_t> ec_of_state(n, npos);
  for (std::size_t i = 0; i < ecs.size(); ++i)
    for (std::size_t s : ecs[i].states) ec_of_state[s] = i;

  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> ec_unknown(ecs.size(), npos);
  for (std::size_t s = 0; s < n; ++s) {
    if (!maybe[s]) continue;
    const std::size_t e = ec_of_state[s];
    if (e == npos) {
      red.unknown[s] = members.size();
      members.push_back({s});
      red.ec_of_unknown.push_back(npos);
    } else {
      if (ec_unknown[e] == npos) {
        ec_unknown[e] = members.size();
        members.push_back(ecs[e].states);
        red.ec_of_unknown.push_back(e);
      }
      red.unknown[s] = ec_unknown[e];
    }
  }

  std::vector<Triplet<N>> entries;
  auto& sys = red.system;
  sys.direction = d;
  sys.row_groups.assign(1, 0);
  std::size_t row_count = 0;
  for (std::size_t u = 0; u < members.size(); ++u) {
    const std::size_t e = red.ec_of_unknown[u];
    const std::size_t first = row_count;
    for (std::size_t s : members[u]) {
      for (std::size_t r = m.choices.first_row(s); r < m.choices.end_row(s); ++r) {
        if (!allowed.empty() && !allowed[r]) continue;
        auto row = m.transitions.row(r);
        if (e != npos) {
          bool inside = true;
          for (std::size_t i = 0; i < row.size() && inside; ++i) inside = ec_of_state[row.column(i)] == e;
          if (inside) continue;
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
          const std::size_t t = row.column(i);
          if (maybe[t]) entries.push_back({row_count, red.unknown[t], row.value(i)});
        }
        sys.b.push_back(row_b[r]);
        red.row_origin.push_back(r);
        ++row_count;
      }
    }
    if (row_count == first) {
      sys.b.push_back(T<N>::zero());
      red.row_origin.push_back(npos);
      ++row_count;
    }
    sys.row_groups.push_back(row_count);
  }
  sys.matrix = from_triplets(row_count, members.size(), std::move(entries));
  return red;
}

/// Absolute row per state realising the solver policy. Inside a collapsed
/// end component the exit member takes the exit row and the others move
/// towards it along end-component rows.
template <typename N>
void apply_policy(const Model<N>& m, const Reduced<N>& red, const std::vector<EndComponent>& ecs,
                  const std::vector<std::size_t>& policy, std::vector<std::size_t>& rows) {
  const auto& groups = red.system.row_groups;
  for (std::size_t u = 0; u + 1 < groups.size(); ++u) {
    const std::size_t r = red.row_origin[groups[u] + policy[u]];
    const std::size_t e = red.ec_of_unknown[u];
    if (e == npos) {
      if (r != npos) {
        for (std::size_t s = 0; s < m.state_count(); ++s)
          if (red.unknown[s] == u) rows[s] = r;
      }
      continue;
    }
    const EndComponent& ec = ecs[e];
    std::vector<bool> done(m.state_count(), false);
    std::size_t exit_state = ec.states.front();
    if (r != npos) {
      for (std::size_t s : ec.states)
        if (m.choices.first_row(s) <= r && r < m.choices.end_row(s)) exit_state = s;
      rows[exit_state] = r;
    }
    done[exit_state] = true;
    for (bool progress = true; progress;) {
      progress = false;
      for (std::size_t row : ec.rows) {
        std::size_t s = 0;
        while (m.choices.end_row(s) <= row) ++s;
        if (done[s]) continue;
        auto view = m.transitions.row(row);
        for (std::size_t i = 0; i < view.size(); ++i) {
          if (done[view.column(i)]) {
            rows[s] = row;
            done[s] = true;
            progress = true;
            break;
          }
        }
      }
    }
  }
}

std::vector<std::size_t> relative_rows(const ChoiceStructure& c, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> out(rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s) out[s] = rows[s] - c.first_row(s);
  return out;
}

bool scheduler_method(SolverMethod m) {
  return m != SolverMethod::ValueIteration && m != SolverMethod::IntervalIteration &&
         m != SolverMethod::OptimisticValueIteration;
}

template <typename N>
CheckResult<N> unbounded_until(const Model<N>& dm, const StateSet& phi1, const StateSet& phi2, Direction dir,
                               const CheckSettings& settings) {
  const std::size_t n = dm.state_count();
  const bool nondet = is_nondeterministic(dm.kind);
  const Graph g = make_graph(dm);
  const Prob01 q = !nondet                  ? prob01_deterministic(g, phi1, phi2)
                   : dir == Direction::Max ? prob01_max(g, phi1, phi2)
                                           : prob01_min(g, phi1, phi2);
  const StateSet maybe = ~(q.prob0 | q.prob1);
  std::vector<N> row_b(dm.row_count(), T<N>::zero());
  for (std::size_t s : maybe.indices())
    for (std::size_t r = dm.choices.first_row(s); r < dm.choices.end_row(s); ++r)
      row_b[r] = successor_mass(dm.transitions, r, q.prob1);
  std::vector<EndComponent> ecs;
  if (nondet && dir == Direction::Max) ecs = mec_decomposition(g, maybe);
  const Reduced<N> red = reduce(dm, maybe, row_b, {}, ecs, dir);
  const SolverOutcome<N> out = solve(red.system, settings.solver);

  CheckResult<N> result;
  result.iterations = out.iterations;
  result.values.resize(n);
  if (out.lower) {
    result.lower.emplace(n);
    result.upper.emplace(n);
  }
  for (std::size_t s = 0; s < n; ++s) {
    N v = q.prob1[s] ? T<N>::one() : T<N>::zero();
    N lo = v, hi = v;
    if (maybe[s]) {
      const std::size_t u = red.unknown[s];
      v = out.values[u];
      if (out.lower) {
        lo = (*out.lower)[u];
        hi = (*out.upper)[u];
      }
    }
    result.values[s] = Extended<N>::finite(std::move(v));
    if (out.lower) {
      (*result.lower)[s] = std::move(lo);
      (*result.upper)[s] = std::move(hi);
    }
  }
  if (nondet && out.policy && scheduler_method(settings.solver.method)) {
    std::vector<std::size_t> rows = q.rows;
    apply_policy(dm, red, ecs, *out.policy, rows);
    result.scheduler = relative_rows(dm.choices, rows);
  }
  return result;
}

template <typename N>
CheckResult<N> bounded_until(const Model<N>& dm, const StateSet& phi1, const StateSet& phi2, long long steps,
                             Direction dir) {
  const std::size_t n = dm.state_count();
  std::vector<N> x(n, T<N>::zero());
  if (steps >= 0)
    for (std::size_t s : phi2.indices()) x[s] = T<N>::one();
  const StateSet active = phi1 - phi2;
  for (long long k = 0; k < steps; ++k) {
    std::vector<N> y = x;
    for (std::size_t s : active.indices()) {
      std::optional<N> best;
      for (std::size_t r = dm.choices.first_row(s); r < dm.choices.end_row(s); ++r) {
        N v = T<N>::zero();
        auto row = dm.transitions.row(r);
        for (std::size_t i = 0; i < row.size(); ++i) v = v + row.value(i) * x[row.column(i)];
        if (!best || improves(dir, v, *best)) best = std::move(v);
      }
      y[s] = std::move(*best);
    }
    x = std::move(y);
  }
  CheckResult<N> result;
  result.iterations = static_cast<std::size_t>(std::max(0LL, steps));
  for (auto& v : x) result.values.push_back(Extended<N>::finite(std::move(v)));
  return result;
}

template <typename N>
CheckResult<N> next(const Model<N>& dm, const StateSet& phi, Direction dir) {
  CheckResult<N> result;
  for (std::size_t s = 0; s < dm.state_count(); ++s) {
    std::optional<N> best;
    for (std::size_t r = dm.choices.first_row(s); r < dm.choices.end_row(s); ++r) {
      N v = successor_mass(dm.transitions, r, phi);
      if (!best || improves(dir, v, *best)) best = std::move(v);
    }
    result.values.push_back(Extended<N>::finite(std::move(*best)));
  }
  return result;
}

/// Transient probability of reaching phi2 through phi1 within time t, by
/// uniformization with Poisson weights truncated once the tail is below
/// eps / 2.
CheckResult<double> time_bounded(const Model<double>& m, const StateSet& phi1, const StateSet& phi2, double t,
                                 double eps, const Deadline* deadline) {
  const std::size_t n = m.state_count();
  const StateSet absorbing = phi2 | ~phi1;
  double rate = 0;
  for (std::size_t s = 0; s < n; ++s)
    if (!absorbing[s]) rate = std::max(rate, m.exit_rates[s]);
  std::vector<double> x(n, 0.0);
  for (std::size_t s : phi2.indices()) x[s] = 1.0;
  CheckResult<double> result;
  if (t == 0 || rate == 0) {
    for (double v : x) result.values.push_back(Extended<double>::finite(v));
    return result;
  }
  const double lambda = rate * t;
  std::vector<double> acc(n, 0.0);
  double mass = 0;
  for (std::size_t k = 0;; ++k) {
    if (deadline) deadline->check();
    const double w = std::exp(-lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(k + 1.0));
    for (std::size_t s = 0; s < n; ++s) acc[s] += w * x[s];
    mass += w;
    if (1.0 - mass <= eps / 2 || (static_cast<double>(k) > lambda && w == 0)) {
      result.iterations = k;
      break;
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (absorbing[s]) {
        y[s] = x[s];
        continue;
      }
      auto row = m.transitions.row(s);
      double v = (1.0 - m.exit_rates[s] / rate) * x[s];
      for (std::size_t i = 0; i < row.size(); ++i) v += row.value(i) / rate * x[row.column(i)];
      y[s] = v;
    }
    x = std::move(y);
  }
  for (double v : acc) result.values.push_back(Extended<double>::finite(std::min(1.0, v)));
  return result;
}

template <typename N>
CheckResult<N> expected_reward(const Model<N>& m, const RewardModel<N>& rm, const StateSet& goal, Direction dir,
                               const CheckSettings& settings) {
  const std::size_t n = m.state_count();
  const Model<N> dm = discrete_view(m);
  const bool nondet = is_nondeterministic(dm.kind);

  // Reward earned per step when leaving through a row; rate rewards are
  // scaled by the expected sojourn time 1 / exit rate.
  std::vector<N> row_reward(dm.row_count(), T<N>::zero());
  for (std::size_t s = 0; s < n; ++s) {
    N sr = rm.state_rewards ? (*rm.state_rewards)[s] : T<N>::zero();
    if (!T<N>::is_zero(sr)) {
      const bool timed = m.kind == ModelKind::Ctmc || (m.kind == ModelKind::Ma && m.markovian_states[s]);
      if (m.kind == ModelKind::Ma && !timed)
        throw UnsupportedError("state rewards on probabilistic states of a Markov automaton");
      if (timed) sr = T<N>::is_zero(m.exit_rates[s]) ? T<N>::zero() : N(sr / m.exit_rates[s]);
    }
    for (std::size_t r = dm.choices.first_row(s); r < dm.choices.end_row(s); ++r) {
      row_reward[r] = sr;
      if (rm.action_rewards) row_reward[r] = row_reward[r] + (*rm.action_rewards)[r];
    }
  }

  const Graph g = make_graph(dm);
  const StateSet all(n, true);
  const StateSet finite = !nondet                  ? prob01_deterministic(g, all, goal).prob1
                          : dir == Direction::Max ? prob01_min(g, all, goal).prob1
                                                  : prob01_max(g, all, goal).prob1;
  const StateSet maybe = finite - goal;

  std::vector<bool> allowed;
  std::vector<EndComponent> ecs;
  if (nondet && dir == Direction::Min) {
    allowed.assign(dm.row_count(), true);
    std::vector<bool> zero_rows(dm.row_count(), false);
    for (std::size_t s : maybe.indices()) {
      for (std::size_t r = dm.choices.first_row(s); r < dm.choices.end_row(s); ++r) {
        for (std::size_t t : dm.transitions.row(r).columns()) allowed[r] = allowed[r] && finite[t];
        zero_rows[r] = allowed[r] && T<N>::is_zero(row_reward[r]);
      }
    }
    ecs = mec_decomposition(g, maybe, zero_rows);
  }
  Reduced<N> red = reduce(dm, maybe, row_reward, allowed, ecs, dir);
  if constexpr (T<N>::ordered) {
    if (settings.solver.method == SolverMethod::IntervalIteration && red.system.size() > 0) {
      const N bound = reward_upper_bound(red.system);
      red.system.lower.emplace(red.system.size(), T<N>::zero());
      red.system.upper.emplace(red.system.size(), bound);
    }
  }
  const SolverOutcome<N> out = solve(red.system, settings.solver);

  CheckResult<N> result;
  result.iterations = out.iterations;
  if (out.lower) {
    result.lower.emplace(n, T<N>::zero());
    result.upper.emplace(n, T<N>::zero());
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!finite[s]) {
      result.values.push_back(Extended<N>::infinity());
      continue;
    }
    if (!maybe[s]) {
      result.values.push_back(Extended<N>::finite(T<N>::zero()));
      continue;
    }
    const std::size_t u = red.unknown[s];
    result.values.push_back(Extended<N>::finite(out.values[u]));
    if (out.lower) {
      (*result.lower)[s] = (*out.lower)[u];
      (*result.upper)[s] = (*out.upper)[u];
    }
  }
  if (nondet && out.policy && scheduler_method(settings.solver.method)) {
    std::vector<std::size_t> rows(dm.choices.state_offsets.begin(), dm.choices.state_offsets.end() - 1);
    apply_policy(dm, red, ecs, *out.policy, rows);
    result.scheduler = relative_rows(dm.choices, rows);
  }
  return result;
}

long long step_bound(const PathBound& b) {
  if (b.value.get_den() != 1) throw ModelError("step bound " + to_string(b.value) + " is not an integer");
  long long k = b.value.get_num().get_si();
  return b.strict ? k - 1 : k;
}

template <typename N>
bool threshold_holds(const Threshold& t, const Extended<N>& v) {
  if (v.infinite) return t.comparison == Comparison::Greater || t.comparison == Comparison::GreaterEqual;
  return satisfies<N>(t, v.value);
}

}  // namespace

template <typename N>
bool CheckResult<N>::holds_initially() const {
  if (!satisfied) throw Error("not a threshold property");
  return initial_states.is_subset_of(*satisfied);
}

template <typename N>
StateSet state_formula(const Model<N>& model, const Expr& formula) {
  const std::size_t n = model.state_count();
  for (const auto& name : labels(formula))
    if (!model.labeling.has(name) && name != "init") throw ModelError("unknown label \"" + name + "\"");
  for (const auto& name : identifiers(formula)) {
    const auto& vars = model.valuations ? model.valuations->variables : std::vector<std::string>{};
    if (std::find(vars.begin(), vars.end(), name) == vars.end())
      throw ModelError("unknown identifier '" + name + "' in property");
  }
  StateSet out(n);
  std::size_t current = 0;
  Environment env;
  env.label = [&](const std::string& name) {
    return model.labeling.has(name) ? model.labeling.get(name)[current] : model.initial_states[current];
  };
  env.identifier = [&](const std::string& name) -> std::optional<Value> {
    const auto& v = *model.valuations;
    const auto it = std::find(v.variables.begin(), v.variables.end(), name);
    const std::size_t slot = static_cast<std::size_t>(it - v.variables.begin());
    const std::int64_t x = v.values[current][slot];
    return v.is_bool[slot] ? Value::of_bool(x != 0) : Value::of_int(Rational(x));
  };
  for (current = 0; current < n; ++current) {
    if (model.valuations) env.variables = model.valuations->values[current];
    if (evaluate_bool(formula, env)) out.set(current);
  }
  return out;
}

template <typename N>
std::string reward_structure_name(const Model<N>& m, const std::optional<std::string>& name) {
  if (name) {
    if (!m.rewards.count(*name)) throw ModelError("unknown reward structure \"" + *name + "\"");
    return *name;
  }
  if (m.rewards.count("")) return "";
  if (m.rewards.size() == 1) return m.rewards.begin()->first;
  if (m.rewards.empty()) throw ModelError("the model has no reward structure");
  throw ModelError("several reward structures; name one with R{\"name\"}");
}

template <typename N>
Direction resolve_direction(const Model<N>& model, const Property& p,
                            const std::function<void(const std::string&)>& on_warning) {
  if (!is_nondeterministic(model.kind)) {
    if (p.direction != Direction::None)
      warn(on_warning, "min/max is ignored on a deterministic model (" + to_string(model.kind) + ")");
    return Direction::None;
  }
  if (p.direction != Direction::None) return p.direction;
  if (!p.threshold)
    throw UnsupportedError("a query (=?) on a nondeterministic model needs min or max");
  const auto c = p.threshold->comparison;
  return c == Comparison::Less || c == Comparison::LessEqual ? Direction::Max : Direction::Min;
}

template <typename N>
CheckResult<N> check(const Model<N>& model, const Property& property, const CheckSettings& settings) {
  if constexpr (std::is_same_v<N, Rational>) {
    if (!scheduler_method(settings.solver.method))
      throw UnsupportedError("exact mode supports the exact, elimination and pi solvers, not " +
                             to_string(settings.solver.method));
  }
  Property p = property;
  p.direction = resolve_direction(model, property, settings.on_warning);
  p = desugar(p);
  const Direction dir = p.direction;
  const auto& f = p.path;
  const StateSet phi2 = state_formula(model, f.right);
  const StateSet phi1 = f.left ? state_formula(model, f.left) : StateSet(model.state_count(), true);

  CheckResult<N> result;
  if (p.op == Operator::Reward) {
    result = expected_reward(model, model.rewards.at(reward_structure_name(model, p.reward_name)), phi2, dir, settings);
  } else if (f.kind == PathKind::Next) {
    result = next(discrete_view(model), phi2, dir);
  } else if (f.bound && model.kind == ModelKind::Ctmc) {
    if constexpr (std::is_same_v<N, double>) {
      result = time_bounded(model, phi1, phi2, f.bound->value.get_d(), settings.solver.precision.get_d(),
                            settings.solver.deadline);
    } else {
      throw UnsupportedError("time-bounded properties on CTMCs need the floating-point engine");
    }
  } else if (f.bound && model.kind == ModelKind::Ma) {
    throw UnsupportedError("time-bounded properties on Markov automata");
  } else if (f.bound) {
    result = bounded_until(discrete_view(model), phi1, phi2, step_bound(*f.bound), dir);
  } else {
    result = unbounded_until(discrete_view(model), phi1, phi2, dir, settings);
  }

  if (p.complement) {
    for (auto& v : result.values) v.value = T<N>::one() - v.value;
    if (result.lower) {
      for (auto& v : *result.lower) v = T<N>::one() - v;
      for (auto& v : *result.upper) v = T<N>::one() - v;
      std::swap(result.lower, result.upper);
    }
  }
  result.initial_states = model.initial_states;
  if (p.threshold) {
    if constexpr (T<N>::ordered) {
      result.satisfied.emplace(model.state_count());
      for (std::size_t s = 0; s < model.state_count(); ++s)
        if (threshold_holds(*p.threshold, result.values[s])) result.satisfied->set(s);
    } else {
      throw UnsupportedError("thresholds cannot be decided in the parametric domain");
    }
  }
  return result;
}

template <typename N>
Model<N> apply_scheduler(const Model<N>& model, const std::vector<std::size_t>& scheduler) {
  const std::size_t n = model.state_count();
  if (scheduler.size() != n) throw Error("scheduler size differs from state count");
  std::vector<Triplet<N>> entries;
  std::vector<std::size_t> chosen(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (scheduler[s] >= model.choices.choice_count(s))
      throw Error("scheduler picks a missing choice at state " + std::to_string(s));
    chosen[s] = model.choices.first_row(s) + scheduler[s];
    auto row = model.transitions.row(chosen[s]);
    for (std::size_t i = 0; i < row.size(); ++i) entries.push_back({s, row.column(i), row.value(i)});
  }
  Model<N> out = model;
  if (out.kind == ModelKind::Mdp) out.kind = ModelKind::Dtmc;
  out.transitions = from_triplets(n, n, std::move(entries));
  out.choices = ChoiceStructure::identity(n);
  if (model.choices.action_labels) {
    out.choices.action_labels.emplace();
    for (std::size_t s = 0; s < n; ++s) out.choices.action_labels->push_back((*model.choices.action_labels)[chosen[s]]);
  }
  for (auto& [name, rm] : out.rewards) {
    if (!rm.action_rewards) continue;
    std::vector<N> picked;
    for (std::size_t s = 0; s < n; ++s) picked.push_back((*model.rewards.at(name).action_rewards)[chosen[s]]);
    rm.action_rewards = std::move(picked);
  }
  return out;
}

#define STORMLET_CHECKER(N)                                                                             \
  template struct CheckResult<N>;                                                                       \
  template StateSet state_formula<N>(const Model<N>&, const Expr&);                                     \
  template Direction resolve_direction<N>(const Model<N>&, const Property&,                             \
                                          const std::function<void(const std::string&)>&);             \
  template std::string reward_structure_name<N>(const Model<N>&, const std::optional<std::string>&);     \
  template CheckResult<N> check<N>(const Model<N>&, const Property&, const CheckSettings&);             \
  template Model<N> apply_scheduler<N>(const Model<N>&, const std::vector<std::size_t>&);

STORMLET_CHECKER(double)
STORMLET_CHECKER(Rational)
STORMLET_CHECKER(RationalFunction)
#undef STORMLET_CHECKER

}  // namespace stormlet
