#include "stormlet/model.hpp"

namespace stormlet {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dtmc: return "dtmc";
    case ModelKind::Ctmc: return "ctmc";
    case ModelKind::Mdp: return "mdp";
    case ModelKind::Ma: return "ma";
  }
  return "?";
}

const StateSet& Labeling::get(const std::string& name) const {
  auto it = labels_.find(name);
  if (it == labels_.end()) throw Error("unknown label '" + name + "'");
  return it->second;
}

void Labeling::add(const std::string& name, StateSet states) {
  if (states.size() != states_) throw Error("label '" + name + "' has wrong width");
  labels_[name] = std::move(states);
}

void Labeling::add_state(const std::string& name, std::size_t state) {
  auto [it, inserted] = labels_.try_emplace(name, StateSet(states_));
  it->second.set(state);
}

std::vector<std::string> Labeling::names() const {
  std::vector<std::string> out;
  for (const auto& [name, set] : labels_) out.push_back(name);
  return out;
}

}  // namespace stormlet
