#include "stormlet/parametric.hpp"

#include <algorithm>
#include <set>

#include "stormlet/checker.hpp"

namespace stormlet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

Rational number(const std::string& text, std::string_view context) {
  if (!is_number_literal(text)) throw ModelError("expected a number, found '" + text + "' in '" + std::string(context) + "'");
  return parse_rational(text);
}

std::string transition_name(std::size_t s, std::size_t t) {
  return "transition " + std::to_string(s) + " -> " + std::to_string(t);
}

bool multi_affine(const RationalFunction& f) {
  if (!f.denominator().is_constant()) return false;
  for (auto v : f.numerator().variables())
    if (f.numerator().degree_in(v) > 1) return false;
  return true;
}

void require_dtmc(const Model<RationalFunction>& m, const char* what) {
  if (m.kind != ModelKind::Dtmc) throw UnsupportedError(std::string(what) + " supports parametric DTMCs only");
}

}  // namespace

ParameterPoint parse_point(std::string_view text) {
  ParameterPoint out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, '=');
    if (parts.size() != 2 || parts[0].empty()) throw ModelError("expected name=value, found '" + item + "'");
    if (!out.emplace(parts[0], number(parts[1], item)).second)
      throw ModelError("parameter '" + parts[0] + "' given twice");
  }
  return out;
}

Region parse_region(std::string_view text) {
  Region out;
  for (const auto& item : split(text, ',')) {
    std::vector<std::string> parts;
    std::string_view rest = item;
    for (;;) {
      const auto pos = rest.find("<=");
      parts.push_back(trim(rest.substr(0, pos)));
      if (pos == std::string_view::npos) break;
      rest = rest.substr(pos + 2);
    }
    if (parts.size() != 3 || parts[1].empty()) throw ModelError("expected lo<=name<=hi, found '" + item + "'");
    Interval iv{number(parts[0], item), number(parts[2], item)};
    if (iv.upper < iv.lower) throw ModelError("empty interval in '" + item + "'");
    if (!out.emplace(parts[1], iv).second) throw ModelError("parameter '" + parts[1] + "' given twice");
  }
  return out;
}

std::vector<std::string> model_parameters(const Model<RationalFunction>& m) {
  std::set<std::string> names;
  auto add = [&](const RationalFunction& f) {
    for (auto v : f.variables()) names.insert(VariablePool::name(v));
  };
  for (const auto& f : m.transitions.values()) add(f);
  for (const auto& [name, rm] : m.rewards) {
    if (rm.state_rewards)
      for (const auto& f : *rm.state_rewards) add(f);
    if (rm.action_rewards)
      for (const auto& f : *rm.action_rewards) add(f);
  }
  return {names.begin(), names.end()};
}

RationalFunction solution_function(const Model<RationalFunction>& m, const Property& property) {
  if (m.kind != ModelKind::Dtmc && m.kind != ModelKind::Ctmc)
    throw UnsupportedError("solution functions need a parametric DTMC or CTMC");
  CheckSettings settings;
  settings.solver.method = SolverMethod::Elimination;
  const auto result = check(m, property, settings);
  const auto& v = result.value_at_initial();
  if (v.infinite) throw UnsupportedError("the expected reward is infinite at the initial state");
  return v.value;
}

Model<Rational> instantiate(const Model<RationalFunction>& m, const ParameterPoint& point) {
  if (m.kind == ModelKind::Ma) throw UnsupportedError("parametric Markov automata");
  for (const auto& name : model_parameters(m))
    if (!point.count(name)) throw ModelError("no value for parameter '" + name + "'");
  auto eval = [&](const RationalFunction& f, const std::string& where) {
    try {
      return f.evaluate(point);
    } catch (const Error& e) {
      throw ModelError(where + " is undefined at this point: " + e.what());
    }
  };
  const std::size_t n = m.state_count();
  const bool rates = m.kind == ModelKind::Ctmc;
  std::vector<Triplet<Rational>> entries;
  Model<Rational> out;
  out.kind = m.kind;
  out.choices = m.choices;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t r = m.choices.first_row(s); r < m.choices.end_row(s); ++r) {
      auto row = m.transitions.row(r);
      Rational sum(0);
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::string where = transition_name(s, row.column(i));
        Rational v = eval(row.value(i), where);
        if (v < 0 || (!rates && v > 1))
          throw ModelError(where + " evaluates to " + to_string(v) + ", outside " + (rates ? "[0,inf)" : "[0,1]"));
        sum += v;
        entries.push_back({r, row.column(i), std::move(v)});
      }
      if (!rates && sum != 1)
        throw ModelError("outgoing probabilities of state " + std::to_string(s) + " sum to " + to_string(sum));
      if (rates) out.exit_rates.push_back(sum);
    }
  }
  out.transitions = from_triplets(m.row_count(), n, std::move(entries));
  out.labeling = m.labeling;
  out.initial_states = m.initial_states;
  out.valuations = m.valuations;
  for (const auto& [name, rm] : m.rewards) {
    RewardModel<Rational> r;
    if (rm.state_rewards) {
      r.state_rewards.emplace();
      for (std::size_t s = 0; s < n; ++s) r.state_rewards->push_back(eval((*rm.state_rewards)[s], "state reward"));
    }
    if (rm.action_rewards) {
      r.action_rewards.emplace();
      for (const auto& f : *rm.action_rewards) r.action_rewards->push_back(eval(f, "action reward"));
    }
    out.rewards.emplace(name, std::move(r));
  }
  if (auto v = validate(out)) throw ModelError("instantiated model is invalid: " + v->message);
  return out;
}

Interval region_lifting(const Model<RationalFunction>& m, const Property& property, const Region& region) {
  require_dtmc(m, "region lifting");
  if (property.op != Operator::Probability) throw UnsupportedError("region lifting supports probability queries only");
  for (const auto& name : model_parameters(m))
    if (!region.count(name)) throw ModelError("the region does not bound parameter '" + name + "'");

  const std::size_t n = m.state_count();
  Model<Rational> mdp;
  mdp.kind = ModelKind::Mdp;
  std::vector<Triplet<Rational>> entries;
  std::size_t rows = 0;
  mdp.choices.state_offsets.assign(1, 0);
  for (std::size_t s = 0; s < n; ++s) {
    auto row = m.transitions.row(s);
    std::set<std::string> used;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!multi_affine(row.value(i)))
        throw UnsupportedError(transition_name(s, row.column(i)) + " is not multi-affine: " + row.value(i).to_string());
      for (auto v : row.value(i).variables()) used.insert(VariablePool::name(v));
    }
    const std::vector<std::string> vars(used.begin(), used.end());
    // One choice per corner of the region restricted to this state's parameters.
    std::vector<std::vector<Rational>> corners;
    for (std::size_t mask = 0; mask < (std::size_t{1} << vars.size()); ++mask) {
      ParameterPoint corner;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        const Interval& iv = region.at(vars[k]);
        corner[vars[k]] = (mask >> k & 1) ? iv.upper : iv.lower;
      }
      std::vector<Rational> dist;
      Rational sum(0);
      for (std::size_t i = 0; i < row.size(); ++i) {
        Rational v = row.value(i).evaluate(corner);
        if (v < 0 || v > 1)
          throw ModelError(transition_name(s, row.column(i)) + " leaves [0,1] at a corner of the region");
        sum += v;
        dist.push_back(std::move(v));
      }
      if (sum != 1) throw ModelError("state " + std::to_string(s) + " is not a distribution at a corner of the region");
      if (std::find(corners.begin(), corners.end(), dist) != corners.end()) continue;
      for (std::size_t i = 0; i < row.size(); ++i) entries.push_back({rows, row.column(i), dist[i]});
      corners.push_back(std::move(dist));
      ++rows;
    }
    mdp.choices.state_offsets.push_back(rows);
  }
  mdp.transitions = from_triplets(rows, n, std::move(entries));
  mdp.labeling = m.labeling;
  mdp.initial_states = m.initial_states;
  mdp.valuations = m.valuations;

  CheckSettings settings;
  settings.solver.method = SolverMethod::PolicyIteration;
  Property query = property;
  query.threshold.reset();
  query.direction = Direction::Min;
  Interval out;
  out.lower = check(mdp, query, settings).value_at_initial().value;
  query.direction = Direction::Max;
  out.upper = check(mdp, query, settings).value_at_initial().value;
  return out;
}

}  // namespace stormlet
