#include "stormlet/bisimulation.hpp"

#include <algorithm>
#include <map>

#include "stormlet/checker.hpp"

namespace stormlet {

namespace {

/// Exact text of a number, so equal values give equal keys.
std::string key_of(double v) { return to_string(rational_from_double(v)); }
std::string key_of(const Rational& v) { return to_string(v); }

/// Summation used inside signatures: exact even for doubles.
Rational exact(double v) { return rational_from_double(v); }
const Rational& exact(const Rational& v) { return v; }

template <typename N>
std::string row_signature(const Model<N>& m, const Partition& p, std::size_t r,
                          const std::vector<const RewardModel<N>*>& rewards) {
  std::map<std::size_t, Rational> mass;
  auto row = m.transitions.row(r);
  for (std::size_t i = 0; i < row.size(); ++i) mass[p.block[row.column(i)]] += exact(row.value(i));
  std::string sig;
  if (m.choices.action_labels && is_nondeterministic(m.kind)) sig +=(*m.choices.action_labels)[r] + "|";
  for (const auto* rm : rewards)
    if (rm->action_rewards) sig += key_of((*rm->action_rewards)[r]) + "|";
  for (const auto& [block, v] : mass) sig += std::to_string(block) + ":" + to_string(v) + ",";
  return sig;
}

/// Renumbers states by signature, blocks in order of first occurrence.
Partition number_blocks(const std::vector<std::string>& signatures) {
  Partition p;
  std::map<std::string, std::size_t> ids;
  for (const auto& sig : signatures) {
    auto [it, inserted] = ids.try_emplace(sig, ids.size());
    p.block.push_back(it->second);
  }
  p.count = ids.size();
  return p;
}

template <typename N>
std::vector<const RewardModel<N>*> reward_models(const Model<N>& m, const std::vector<std::string>& names) {
  std::vector<const RewardModel<N>*> out;
  for (const auto& name : names) {
    auto it = m.rewards.find(name);
    if (it == m.rewards.end()) throw ModelError("unknown reward structure \"" + name + "\"");
    out.push_back(&it->second);
  }
  return out;
}

}  // namespace

template <typename N>
Partition initial_partition(const Model<N>& m, const std::vector<std::string>& labels,
                            const std::vector<std::string>& rewards) {
  const auto rms = reward_models(m, rewards);
  std::vector<std::string> sigs(m.state_count());
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    std::string& sig = sigs[s];
    for (const auto& l : labels) sig += m.labeling.get(l)[s] ? '1' : '0';
    if (m.kind == ModelKind::Ma) sig += m.markovian_states[s] ? 'M' : 'P';
    for (const auto* rm : rms) sig += "|" + (rm->state_rewards ? key_of((*rm->state_rewards)[s]) : std::string("0"));
  }
  return number_blocks(sigs);
}

template <typename N>
Partition refine(const Model<N>& m, Partition p) {
  std::vector<const RewardModel<N>*> rms;
  for (const auto& [name, rm] : m.rewards) rms.push_back(&rm);
  for (;;) {
    std::vector<std::string> sigs(m.state_count());
    for (std::size_t s = 0; s < m.state_count(); ++s) {
      std::vector<std::string> rows;
      for (std::size_t r = m.choices.first_row(s); r < m.choices.end_row(s); ++r)
        rows.push_back(row_signature(m, p, r, rms));
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      sigs[s] = std::to_string(p.block[s]) + "#";
      for (const auto& r : rows) sigs[s] += r + ";";
    }
    Partition next = number_blocks(sigs);
    if (next.count == p.count) return p;
    p = std::move(next);
  }
}

template <typename N>
Model<N> quotient(const Model<N>& m, const Partition& p, const std::vector<std::string>& rewards) {
  const std::size_t k = p.count;
  std::vector<std::size_t> rep(k, m.state_count());
  for (std::size_t s = m.state_count(); s-- > 0;) rep[p.block[s]] = s;

  Model<N> q;
  q.kind = m.kind;
  std::vector<Triplet<N>> entries;
  std::vector<std::size_t> rows;  // original row of each quotient row
  q.choices.state_offsets.assign(1, 0);
  const auto rms = reward_models(m, rewards);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t s = rep[b];
    std::vector<std::string> seen;
    for (std::size_t r = m.choices.first_row(s); r < m.choices.end_row(s); ++r) {
      // Rows identical up to the partition collapse into one choice.
      std::string sig = row_signature(m, p, r, rms);
      if (std::find(seen.begin(), seen.end(), sig) != seen.end()) continue;
      seen.push_back(std::move(sig));
      auto row = m.transitions.row(r);
      for (std::size_t i = 0; i < row.size(); ++i) entries.push_back({rows.size(), p.block[row.column(i)], row.value(i)});
      rows.push_back(r);
    }
    q.choices.state_offsets.push_back(rows.size());
  }
  q.transitions = from_triplets(rows.size(), k, std::move(entries));
  if (m.choices.action_labels) {
    q.choices.action_labels.emplace();
    for (std::size_t r : rows) q.choices.action_labels->push_back((*m.choices.action_labels)[r]);
  }
  if (!m.exit_rates.empty())
    for (std::size_t b = 0; b < k; ++b) q.exit_rates.push_back(m.exit_rates[rep[b]]);
  if (m.kind == ModelKind::Ma) {
    q.markovian_states = StateSet(k);
    for (std::size_t b = 0; b < k; ++b) q.markovian_states.set(b, m.markovian_states[rep[b]]);
  }
  q.initial_states = StateSet(k);
  for (std::size_t s : m.initial_states.indices()) q.initial_states.set(p.block[s]);

  q.labeling = Labeling(k);
  for (const auto& [name, set] : m.labeling.all()) {
    StateSet lifted(k);
    bool uniform = true;
    for (std::size_t s = 0; s < m.state_count() && uniform; ++s) {
      if (set[s] != set[rep[p.block[s]]]) uniform = false;
      if (set[s]) lifted.set(p.block[s]);
    }
    if (uniform) q.labeling.add(name, std::move(lifted));
  }
  if (m.labeling.has("init") && !q.labeling.has("init")) q.labeling.add("init", q.initial_states);

  for (const auto& name : rewards) {
    const auto& rm = m.rewards.at(name);
    RewardModel<N> out;
    if (rm.state_rewards) {
      out.state_rewards.emplace();
      for (std::size_t b = 0; b < k; ++b) out.state_rewards->push_back((*rm.state_rewards)[rep[b]]);
    }
    if (rm.action_rewards) {
      out.action_rewards.emplace();
      for (std::size_t r : rows) out.action_rewards->push_back((*rm.action_rewards)[r]);
    }
    q.rewards.emplace(name, std::move(out));
  }
  if (auto v = validate(q)) throw Error("quotient is invalid: " + v->message);
  return q;
}

template <typename N>
Minimized<N> minimize_for(const Model<N>& model, const Property& property) {
  Model<N> m = model;
  Property p = property;
  std::vector<std::string> labels{"__right"};
  m.labeling.add("__right", state_formula(model, p.path.right));
  p.path.right = make_label("__right");
  if (p.path.left) {
    m.labeling.add("__left", state_formula(model, p.path.left));
    p.path.left = make_label("__left");
    labels.push_back("__left");
  }
  std::vector<std::string> rewards;
  if (p.op == Operator::Reward) {
    const std::string name = reward_structure_name(model, p.reward_name);
    rewards.push_back(name);
    p.reward_name = name;
  }
  // Refinement sees only the reward structure in use.
  std::map<std::string, RewardModel<N>> kept;
  for (const auto& name : rewards) kept.emplace(name, m.rewards.at(name));
  m.rewards = std::move(kept);
  m.valuations.reset();

  Minimized<N> out;
  out.partition = refine(m, initial_partition(m, labels, rewards));
  out.model = quotient(m, out.partition, rewards);
  out.property = std::move(p);
  return out;
}

#define STORMLET_BISIM(N)                                                                                \
  template Partition initial_partition<N>(const Model<N>&, const std::vector<std::string>&,                 \
                                          const std::vector<std::string>&);                                 \
  template Partition refine<N>(const Model<N>&, Partition);                                                 \
  template Model<N> quotient<N>(const Model<N>&, const Partition&, const std::vector<std::string>&);        \
  template Minimized<N> minimize_for<N>(const Model<N>&, const Property&);

STORMLET_BISIM(double)
STORMLET_BISIM(Rational)
#undef STORMLET_BISIM

}  // namespace stormlet
