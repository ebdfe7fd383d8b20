#include "stormlet/builder.hpp"

#include <map>
#include <sstream>

namespace stormlet {

namespace {

std::string describe(const CompiledProgram& cp, const Valuation& v) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << cp.variables[i] << '=';
    if (cp.is_bool[i]) out << (v[i] ? "true" : "false");
    else out << v[i];
  }
  out << ')';
  return out.str();
}

std::int64_t constant_int(const Expr& e, const std::string& what) {
  auto v = literal_value(fold_constants(e));
  if (!v || v->type == Type::Bool || v->as_number().get_den() != 1 || !v->as_number().get_num().fits_slong_p())
    throw BuildError(what + " is not a constant integer: " + to_string(e));
  return v->as_number().get_num().get_si();
}

Environment state_env(const Valuation& v) {
  Environment env;
  env.variables = std::span<const std::int64_t>(v);
  return env;
}

RationalFunction evaluate_function(const Expr& e, const Environment& env) {
  return std::visit(
      [&](const auto& n) -> RationalFunction {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IdentifierNode>) {
          return RationalFunction::parameter(n.name);
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          if (n.op == UnaryOp::Negate) return -evaluate_function(n.operand, env);
          throw ModelError("boolean operator in a parametric expression: " + to_string(e));
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          switch (n.op) {
            case BinaryOp::Add: return evaluate_function(n.lhs, env) + evaluate_function(n.rhs, env);
            case BinaryOp::Sub: return evaluate_function(n.lhs, env) - evaluate_function(n.rhs, env);
            case BinaryOp::Mul: return evaluate_function(n.lhs, env) * evaluate_function(n.rhs, env);
            case BinaryOp::Div: {
              RationalFunction d = evaluate_function(n.rhs, env);
              if (d.is_zero()) throw ModelError("division by zero in " + to_string(e));
              return evaluate_function(n.lhs, env) / d;
            }
            default: throw ModelError("comparison in a parametric expression: " + to_string(e));
          }
        } else if constexpr (std::is_same_v<T, IteNode>) {
          return evaluate_bool(n.condition, env) ? evaluate_function(n.then_branch, env)
                                                 : evaluate_function(n.else_branch, env);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          if (n.function == Function::Pow && identifiers(n.arguments[1]).empty()) {
            const Rational k = evaluate(n.arguments[1], env).as_number();
            if (k.get_den() != 1 || k < 0 || k > 1000)
              throw UnsupportedError("parametric pow needs a small non-negative integer exponent");
            RationalFunction base = evaluate_function(n.arguments[0], env), out(1);
            for (long i = 0; i < k.get_num().get_si(); ++i) out *= base;
            return out;
          }
          if (!identifiers(e).empty())
            throw UnsupportedError(to_string(n.function) + " of a parameter: " + to_string(e));
          return RationalFunction(evaluate(e, env).as_number());
        } else {
          return RationalFunction(evaluate(e, env).as_number());
        }
      },
      e.node().data);
}

}  // namespace

template <>
Rational evaluate_number<Rational>(const Expr& e, const Environment& env) {
  return evaluate(e, env).as_number();
}
template <>
double evaluate_number<double>(const Expr& e, const Environment& env) {
  return evaluate(e, env).as_number().get_d();
}
template <>
RationalFunction evaluate_number<RationalFunction>(const Expr& e, const Environment& env) {
  return evaluate_function(e, env);
}

CompiledProgram compile_program(const Program& source, const BuildOptions& options) {
  CompiledProgram cp;
  cp.parameters = options.parameters;
  Program p = substitute_constants(source, options.constants, options.parameters);

  for (std::size_t m = 0; m < p.modules.size(); ++m) {
    for (const auto& v : p.modules[m].variables) {
      cp.slot[v.name] = cp.variables.size();
      cp.variables.push_back(v.name);
      cp.is_bool.push_back(v.is_bool);
      cp.owner.push_back(m);
      if (v.is_bool) {
        cp.low.push_back(0);
        cp.high.push_back(1);
      } else {
        cp.low.push_back(constant_int(v.low, "lower bound of '" + v.name + "'"));
        cp.high.push_back(constant_int(v.high, "upper bound of '" + v.name + "'"));
        if (cp.low.back() > cp.high.back()) throw BuildError("empty range for variable '" + v.name + "'");
      }
    }
  }

  for (auto& f : p.formulas) {
    f.body = substitute(f.body, [&](const std::string& id) -> std::optional<Expr> {
      for (const auto& g : p.formulas) {
        if (&g == &f) break;
        if (g.name == id) return g.body;
      }
      return std::nullopt;
    });
  }
  cp.program = p;
  auto resolve = [&](Expr& e) { e = resolve_expression(cp, e); };
  for (auto& f : cp.program.formulas) resolve(f.body);
  for (auto& m : cp.program.modules) {
    for (auto& v : m.variables)
      if (v.init) resolve(*v.init);
    for (auto& c : m.commands) {
      resolve(c.guard);
      for (auto& u : c.updates) {
        resolve(u.probability);
        for (auto& a : u.assignments) resolve(a.value);
      }
    }
  }
  for (auto& l : cp.program.labels) {
    if (l.name == "init" || l.name == "deadlock") throw BuildError("label \"" + l.name + "\" is reserved");
    resolve(l.expression);
  }
  for (auto& r : cp.program.rewards)
    for (auto& item : r.items) {
      resolve(item.guard);
      resolve(item.value);
    }
  if (cp.program.initial_states) resolve(*cp.program.initial_states);

  // Anything still named after resolution must be a parameter.
  auto check = [&](const Expr& e, bool parameters_allowed) {
    for (const auto& id : identifiers(e)) {
      if (!cp.parameters.count(id)) throw BuildError("unknown identifier '" + id + "' in " + to_string(e));
      if (!parameters_allowed) throw UnsupportedError("parameter '" + id + "' outside a probability: " + to_string(e));
    }
  };
  for (std::size_t m = 0; m < cp.program.modules.size(); ++m) {
    const auto& mod = cp.program.modules[m];
    for (const auto& v : mod.variables)
      if (v.init) check(*v.init, false);
    for (const auto& c : mod.commands) {
      if (c.markovian && !c.action.empty())
        throw UnsupportedError("Markovian command with action '" + c.action + "' in module '" + mod.name + "'");
      check(c.guard, false);
      for (const auto& u : c.updates) {
        check(u.probability, true);
        for (const auto& a : u.assignments) check(a.value, false);
      }
      if (!c.action.empty()) {
        std::size_t k = 0;
        while (k < cp.actions.size() && cp.actions[k] != c.action) ++k;
        if (k == cp.actions.size()) {
          cp.actions.push_back(c.action);
          cp.action_modules.emplace_back();
        }
        auto& owners = cp.action_modules[k];
        if (owners.empty() || owners.back() != m) owners.push_back(m);
      }
    }
  }
  for (const auto& l : cp.program.labels) check(l.expression, false);
  for (const auto& r : cp.program.rewards)
    for (const auto& item : r.items) {
      check(item.guard, false);
      check(item.value, true);
    }
  if (cp.program.initial_states) check(*cp.program.initial_states, false);
  return cp;
}

Expr resolve_expression(const CompiledProgram& cp, const Expr& e) {
  Expr out = substitute(e, [&](const std::string& id) -> std::optional<Expr> {
    if (auto it = cp.slot.find(id); it != cp.slot.end())
      return make_variable(id, it->second, cp.is_bool[it->second]);
    if (const auto* c = cp.program.find_constant(id); c && c->value) return *c->value;
    for (const auto& f : cp.program.formulas)
      if (f.name == id) return f.body;
    return std::nullopt;
  });
  // Formula bodies resolved earlier may still name variables.
  out = substitute(out, [&](const std::string& id) -> std::optional<Expr> {
    if (auto it = cp.slot.find(id); it != cp.slot.end())
      return make_variable(id, it->second, cp.is_bool[it->second]);
    return std::nullopt;
  });
  return fold_constants(out);
}

std::vector<Valuation> enumerate_initial_states(const CompiledProgram& cp) {
  const std::size_t n = cp.variables.size();
  std::vector<const VariableDecl*> decls;
  for (const auto& m : cp.program.modules)
    for (const auto& v : m.variables) decls.push_back(&v);

  auto in_range = [&](std::size_t i, std::int64_t x) { return x >= cp.low[i] && x <= cp.high[i]; };
  if (!cp.program.initial_states) {
    Valuation v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (decls[i]->init) {
        Value x = evaluate(*decls[i]->init, Environment{});
        if (cp.is_bool[i]) {
          v[i] = x.as_bool();
        } else {
          const Rational& q = x.as_number();
          if (q.get_den() != 1) throw BuildError("initial value of '" + cp.variables[i] + "' is not an integer");
          v[i] = q.get_num().get_si();
        }
      } else {
        v[i] = cp.low[i];
      }
      if (!in_range(i, v[i]))
        throw BuildError("initial value of '" + cp.variables[i] + "' outside its range");
    }
    return {v};
  }
  for (std::size_t i = 0; i < n; ++i)
    if (decls[i]->init)
      throw BuildError("variable '" + cp.variables[i] + "' has an initial value although an init block is given");

  double space = 1;
  for (std::size_t i = 0; i < n; ++i) space *= static_cast<double>(cp.high[i] - cp.low[i] + 1);
  if (space > 1e7) throw BuildError("init block ranges over too many valuations to scan");
  std::vector<Valuation> out;
  Valuation v(cp.low);
  for (;;) {
    if (evaluate_bool(*cp.program.initial_states, state_env(v))) out.push_back(v);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (v[i] < cp.high[i]) {
        ++v[i];
        break;
      }
      v[i] = cp.low[i];
      if (i == 0) {
        i = n + 1;
        break;
      }
    }
    if (n == 0 || i == n + 1) break;
  }
  if (out.empty()) throw BuildError("no valuation satisfies the init block");
  return out;
}

namespace {

template <typename N>
struct UpdateResult {
  N probability;
  std::vector<std::pair<std::size_t, std::int64_t>> writes;
};

template <typename N>
std::vector<UpdateResult<N>> apply_command(const CompiledProgram& cp, std::size_t m, std::size_t ci,
                                           const Valuation& state, const Environment& env) {
  const auto& mod = cp.program.modules[m];
  const auto& c = mod.commands[ci];
  std::vector<UpdateResult<N>> out;
  for (const auto& u : c.updates) {
    UpdateResult<N> r{evaluate_number<N>(u.probability, env), {}};
    for (const auto& a : u.assignments) {
      const std::size_t slot = cp.slot.at(a.variable);
      Value x = evaluate(a.value, env);
      std::int64_t value;
      if (cp.is_bool[slot]) {
        value = x.as_bool();
      } else {
        const Rational& q = x.as_number();
        if (q.get_den() != 1 || !q.get_num().fits_slong_p())
          throw BuildError("non-integer value " + x.to_string() + " assigned to '" + a.variable + "'");
        value = q.get_num().get_si();
      }
      if (value < cp.low[slot] || value > cp.high[slot])
        throw BuildError("command " + std::to_string(ci + 1) + " of module '" + mod.name + "' sets '" +
                         a.variable + "' to " + std::to_string(value) + ", outside [" + std::to_string(cp.low[slot]) +
                         ".." + std::to_string(cp.high[slot]) + "], in state " + describe(cp, state));
      r.writes.emplace_back(slot, value);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

template <typename N>
std::vector<Choice<N>> expand_state(const CompiledProgram& cp, const Valuation& state) {
  using T = number_traits<N>;
  const Environment env = state_env(state);
  std::vector<Choice<N>> out;
  const auto& mods = cp.program.modules;
  for (std::size_t m = 0; m < mods.size(); ++m) {
    for (std::size_t ci = 0; ci < mods[m].commands.size(); ++ci) {
      const auto& c = mods[m].commands[ci];
      if (!c.action.empty() || !evaluate_bool(c.guard, env)) continue;
      Choice<N> choice;
      choice.markovian = c.markovian;
      choice.commands.emplace_back(m, ci);
      for (auto& u : apply_command<N>(cp, m, ci, state, env)) {
        if (T::is_zero(u.probability)) continue;
        Valuation target = state;
        for (auto [slot, value] : u.writes) target[slot] = value;
        choice.branches.push_back({std::move(u.probability), std::move(target)});
      }
      out.push_back(std::move(choice));
    }
  }
  for (std::size_t a = 0; a < cp.actions.size(); ++a) {
    // Enabled commands of every owning module; none enabled anywhere blocks.
    std::vector<std::vector<std::size_t>> enabled;
    bool blocked = false;
    for (std::size_t m : cp.action_modules[a]) {
      enabled.emplace_back();
      for (std::size_t ci = 0; ci < mods[m].commands.size(); ++ci) {
        const auto& c = mods[m].commands[ci];
        if (c.action == cp.actions[a] && evaluate_bool(c.guard, env)) enabled.back().push_back(ci);
      }
      if (enabled.back().empty()) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    std::vector<std::size_t> pick(enabled.size(), 0);
    for (;;) {
      Choice<N> choice;
      choice.action = cp.actions[a];
      struct Partial {
        N probability;
        Valuation target;
      };
      std::vector<Partial> partial{{T::one(), state}};
      for (std::size_t k = 0; k < enabled.size(); ++k) {
        const std::size_t m = cp.action_modules[a][k], ci = enabled[k][pick[k]];
        choice.commands.emplace_back(m, ci);
        std::vector<Partial> next;
        for (const auto& u : apply_command<N>(cp, m, ci, state, env)) {
          if (T::is_zero(u.probability)) continue;
          for (const auto& p : partial) {
            Partial q{N(p.probability * u.probability), p.target};
            for (auto [slot, value] : u.writes) q.target[slot] = value;
            next.push_back(std::move(q));
          }
        }
        partial = std::move(next);
      }
      for (auto& p : partial) choice.branches.push_back({std::move(p.probability), std::move(p.target)});
      out.push_back(std::move(choice));

      std::size_t k = enabled.size();
      while (k > 0) {
        --k;
        if (++pick[k] < enabled[k].size()) break;
        pick[k] = 0;
        if (k == 0) {
          k = enabled.size() + 1;
          break;
        }
      }
      if (k == enabled.size() + 1) break;
    }
  }
  return out;
}

namespace {

template <typename N>
Model<N> explore(const CompiledProgram& cp, const BuildOptions& options) {
  using T = number_traits<N>;
  const ModelKind kind = cp.program.kind;
  std::map<Valuation, std::size_t> index;
  std::vector<Valuation> states;
  auto intern = [&](const Valuation& v) {
    auto [it, inserted] = index.emplace(v, states.size());
    if (inserted) states.push_back(v);
    return it->second;
  };
  const auto initial = enumerate_initial_states(cp);
  for (const auto& v : initial) intern(v);

  struct Rewards {
    const RewardStruct* spec = nullptr;
    bool has_state = false, has_action = false;
    std::vector<N> state, action;
  };
  std::vector<Rewards> rewards;
  for (const auto& r : cp.program.rewards) {
    Rewards x;
    x.spec = &r;
    for (const auto& item : r.items) (item.action ? x.has_action : x.has_state) = true;
    if (!x.has_action) x.has_state = true;
    rewards.push_back(std::move(x));
  }

  std::vector<Triplet<N>> entries;
  std::vector<std::size_t> offsets{0};  // per row
  std::vector<std::size_t> state_offsets{0};
  std::vector<std::string> actions;
  std::vector<N> exit_rates;
  std::vector<bool> markovian, deadlock;
  std::size_t overlapping = 0;

  auto check_distribution = [&](const Choice<N>& c, const Valuation& v) {
    N sum = T::zero();
    for (const auto& b : c.branches) {
      if constexpr (T::ordered) {
        if (b.probability < T::zero() || T::one() < b.probability)
          throw BuildError("probability " + T::to_string(b.probability) + " outside [0,1] in state " +
                           describe(cp, v));
      }
      sum = sum + b.probability;
    }
    if (!T::is_one(sum))
      throw BuildError("probabilities sum to " + T::to_string(sum) + " in state " + describe(cp, v) +
                       " (command " + std::to_string(c.commands.front().second + 1) + " of module '" +
                       cp.program.modules[c.commands.front().first].name + "')");
  };
  auto check_rates = [&](const Choice<N>& c, const Valuation& v) {
    if constexpr (T::ordered) {
      for (const auto& b : c.branches)
        if (b.probability < T::zero())
          throw BuildError("negative rate " + T::to_string(b.probability) + " in state " + describe(cp, v));
    }
  };
  auto action_reward = [&](const Rewards& r, const Choice<N>& c, const Environment& env) {
    N total = T::zero();
    for (const auto& item : r.spec->items)
      if (item.action && *item.action == c.action && evaluate_bool(item.guard, env))
        total = total + evaluate_number<N>(item.value, env);
    return total;
  };
  // Emits one matrix row mixing `parts` with the given weights.
  auto emit_row = [&](const std::vector<std::pair<N, const Choice<N>*>>& parts,
                      const std::string& action, const Environment& env) {
    const std::size_t row = offsets.size() - 1;
    for (const auto& [w, c] : parts)
      for (const auto& b : c->branches) entries.push_back({row, intern(b.target), N(w * b.probability)});
    for (auto& r : rewards) {
      if (!r.has_action) continue;
      N total = T::zero();
      for (const auto& [w, c] : parts) total = total + w * action_reward(r, *c, env);
      r.action.push_back(std::move(total));
    }
    actions.push_back(action);
    offsets.push_back(row + 1);
  };

  for (std::size_t s = 0; s < states.size(); ++s) {
    const Valuation current = states[s];
    const Environment env = state_env(current);
    auto choices = expand_state<N>(cp, current);
    const std::size_t first_row = offsets.size() - 1;
    bool is_markovian = false, is_deadlock = false;
    N exit = T::zero();

    std::vector<const Choice<N>*> probabilistic, rate;
    for (const auto& c : choices) (c.markovian || kind == ModelKind::Ctmc ? rate : probabilistic).push_back(&c);

    if (kind == ModelKind::Ctmc || (kind == ModelKind::Ma && probabilistic.empty() && !rate.empty())) {
      if (!rate.empty()) {
        for (const auto* c : rate) {
          check_rates(*c, current);
          for (const auto& b : c->branches) exit = exit + b.probability;
        }
        const std::size_t row = offsets.size() - 1;
        for (const auto* c : rate)
          for (const auto& b : c->branches) entries.push_back({row, intern(b.target), b.probability});
        // Action rewards of a rate row are weighted by each choice's share of the exit rate.
        for (auto& r : rewards) {
          if (!r.has_action) continue;
          N total = T::zero();
          if (!T::is_zero(exit)) {
            for (const auto* c : rate) {
              N share = T::zero();
              for (const auto& b : c->branches) share = share + b.probability;
              total = total + share / exit * action_reward(r, *c, env);
            }
          }
          r.action.push_back(std::move(total));
        }
        actions.push_back(rate.size() == 1 ? rate.front()->action : std::string());
        offsets.push_back(row + 1);
        is_markovian = true;
      }
    } else if (!probabilistic.empty()) {
      for (const auto* c : probabilistic) check_distribution(*c, current);
      if (kind == ModelKind::Dtmc) {
        if (probabilistic.size() > 1) ++overlapping;
        const N weight = N(T::one() / N(static_cast<int>(probabilistic.size())));
        std::vector<std::pair<N, const Choice<N>*>> parts;
        for (const auto* c : probabilistic) parts.emplace_back(weight, c);
        emit_row(parts, probabilistic.size() == 1 ? probabilistic.front()->action : std::string(), env);
      } else {
        for (const auto* c : probabilistic) emit_row({{T::one(), c}}, c->action, env);
      }
    }

    if (offsets.size() - 1 == first_row) {
      if (!options.fix_deadlocks)
        throw BuildError("deadlock in state " + describe(cp, current) + " (use fix-deadlocks to add self-loops)");
      is_deadlock = true;
      const std::size_t row = first_row;
      if (kind == ModelKind::Ctmc) {
        is_markovian = true;  // empty rate row: absorbing
      } else {
        entries.push_back({row, s, T::one()});
      }
      for (auto& r : rewards)
        if (r.has_action) r.action.push_back(T::zero());
      actions.emplace_back();
      offsets.push_back(row + 1);
    }

    for (auto& r : rewards) {
      if (!r.has_state) continue;
      N total = T::zero();
      for (const auto& item : r.spec->items)
        if (!item.action && evaluate_bool(item.guard, env)) total = total + evaluate_number<N>(item.value, env);
      r.state.push_back(std::move(total));
    }
    exit_rates.push_back(exit);
    markovian.push_back(is_markovian);
    state_offsets.push_back(offsets.size() - 1);
    deadlock.push_back(is_deadlock);
  }

  if (overlapping && options.on_warning)
    options.on_warning(std::to_string(overlapping) +
                       " state(s) of the DTMC enable several commands; choosing uniformly among them");

  const std::size_t n = states.size();
  Model<N> model;
  model.kind = kind;
  model.choices.state_offsets = std::move(state_offsets);
  model.transitions = from_triplets(offsets.size() - 1, n, std::move(entries));
  model.choices.action_labels = std::move(actions);
  model.labeling = Labeling(n);
  model.initial_states = StateSet(n);
  for (const auto& v : initial) model.initial_states.set(index.at(v));
  model.labeling.add("init", model.initial_states);
  StateSet dead(n);
  for (std::size_t s = 0; s < n; ++s) dead.set(s, deadlock[s]);
  model.labeling.add("deadlock", dead);
  for (const auto& l : cp.program.labels) {
    StateSet set(n);
    for (std::size_t s = 0; s < n; ++s) set.set(s, evaluate_bool(l.expression, state_env(states[s])));
    model.labeling.add(l.name, std::move(set));
  }
  if (kind == ModelKind::Ctmc || kind == ModelKind::Ma) model.exit_rates = exit_rates;
  if (kind == ModelKind::Ma) {
    model.markovian_states = StateSet(n);
    for (std::size_t s = 0; s < n; ++s) model.markovian_states.set(s, markovian[s]);
  }
  for (auto& r : rewards) {
    RewardModel<N> rm;
    if (r.has_state) rm.state_rewards = std::move(r.state);
    if (r.has_action) rm.action_rewards = std::move(r.action);
    model.rewards.emplace(r.spec->name, std::move(rm));
  }
  StateValuations vals{cp.variables, cp.is_bool, std::move(states)};
  model.valuations = std::move(vals);
  return model;
}

}  // namespace

template <typename N>
Model<N> build_model(const Program& program, const BuildOptions& options) {
  if constexpr (std::is_same_v<N, double>) {
    return to_float_model(build_model<Rational>(program, options));
  } else {
    if constexpr (std::is_same_v<N, Rational>) {
      if (!options.parameters.empty()) throw UnsupportedError("parameters require a parametric build");
    }
    const CompiledProgram cp = compile_program(program, options);
    Model<N> model = explore<N>(cp, options);
    if (auto v = validate(model)) throw BuildError("built model is invalid: " + v->message);
    return model;
  }
}

template std::vector<Choice<Rational>> expand_state<Rational>(const CompiledProgram&, const Valuation&);
template std::vector<Choice<RationalFunction>> expand_state<RationalFunction>(const CompiledProgram&,
                                                                               const Valuation&);
template Model<double> build_model<double>(const Program&, const BuildOptions&);
template Model<Rational> build_model<Rational>(const Program&, const BuildOptions&);
template Model<RationalFunction> build_model<RationalFunction>(const Program&, const BuildOptions&);

}  // namespace stormlet
