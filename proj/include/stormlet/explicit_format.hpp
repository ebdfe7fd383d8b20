#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stormlet/model.hpp"

namespace stormlet {

/// Contents of a `.tra`/`.lab`/`.rew` triple before assembly into a model.
///
/// `.tra`: first line `dtmc`, `ctmc` or `mdp`; then `src dst value` lines
/// (`src choice dst prob` for mdp, choices numbered from 0 per state).
/// `.lab`: `#DECLARATION`, the declared label names, `#END`, then lines
/// `state label [label ...]`. `.rew`: lines `state value`. Fields are
/// separated by single spaces and `#` starts a comment.
struct ExplicitTables {
  ModelKind kind = ModelKind::Dtmc;
  std::size_t states = 0;
  ChoiceStructure choices;
  std::vector<Triplet<Rational>> entries;  // row = matrix row
  std::vector<std::string> declared_labels;
  Labeling labeling;
  std::optional<std::vector<Rational>> state_rewards;
};

ExplicitTables parse_explicit(std::string_view tra, std::string_view lab,
                              std::optional<std::string_view> rew = std::nullopt);

/// Validated model. Initial states come from the `init` label, or state 0
/// when the labeling does not declare one. State rewards become the
/// unnamed reward structure.
Model<Rational> explicit_model(const ExplicitTables& tables);

Model<Rational> read_explicit_files(const std::string& tra_path, const std::string& lab_path,
                                    const std::optional<std::string>& rew_path = std::nullopt);

/// Writes a model in the same formats (probabilities as exact fractions).
std::string write_tra(const Model<Rational>& model);
std::string write_lab(const Model<Rational>& model);

}  // namespace stormlet
