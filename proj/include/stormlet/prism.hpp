#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stormlet/expression.hpp"
#include "stormlet/model.hpp"

namespace stormlet {

struct ConstantDecl {
  std::string name;
  Type type = Type::Int;
  std::optional<Expr> value;
  friend bool operator==(const ConstantDecl&, const ConstantDecl&) = default;
};

struct FormulaDecl {
  std::string name;
  Expr body;
  friend bool operator==(const FormulaDecl&, const FormulaDecl&) = default;
};

struct VariableDecl {
  std::string name;
  bool is_bool = false;
  Expr low;   // unset for bool
  Expr high;  // unset for bool
  std::optional<Expr> init;
  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

struct Assignment {
  std::string variable;
  Expr value;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Update {
  Expr probability;  // rate for CTMC commands and Markovian MA commands
  std::vector<Assignment> assignments;
  friend bool operator==(const Update&, const Update&) = default;
};

struct Command {
  std::string action;       // empty: silent
  bool markovian = false;   // `<...>` command of a Markov automaton
  Expr guard;
  std::vector<Update> updates;
  friend bool operator==(const Command&, const Command&) = default;
};

struct Module {
  std::string name;
  std::vector<VariableDecl> variables;
  std::vector<Command> commands;
  friend bool operator==(const Module&, const Module&) = default;
};

struct LabelDecl {
  std::string name;
  Expr expression;
  friend bool operator==(const LabelDecl&, const LabelDecl&) = default;
};

struct RewardItem {
  std::optional<std::string> action;  // set: transition reward ("" = silent)
  Expr guard;
  Expr value;
  friend bool operator==(const RewardItem&, const RewardItem&) = default;
};

struct RewardStruct {
  std::string name;  // empty for an unnamed structure
  std::vector<RewardItem> items;
  friend bool operator==(const RewardStruct&, const RewardStruct&) = default;
};

/// Abstract syntax of a PRISM program (supported subset).
struct Program {
  ModelKind kind = ModelKind::Dtmc;
  std::vector<ConstantDecl> constants;
  std::vector<FormulaDecl> formulas;
  std::vector<Module> modules;
  std::vector<LabelDecl> labels;
  std::vector<RewardStruct> rewards;
  std::optional<Expr> initial_states;  // init ... endinit

  const ConstantDecl* find_constant(const std::string& name) const;
  std::set<std::string> action_names() const;

  friend bool operator==(const Program&, const Program&) = default;
};

/// Parses a program; module renamings are expanded into full modules.
Program parse_program(std::string_view text);
Program parse_program_file(const std::string& path);

/// Canonical PRISM text; parse_program(to_string(p)) == p.
std::string to_string(const Program& program);

using ConstantBindings = std::map<std::string, Value>;

/// Parses "N=3,p=0.1,flag=true".
ConstantBindings parse_constant_bindings(std::string_view text);

/// Replaces every constant by its literal value and folds constant
/// subexpressions. Constants named in `parameters` are left symbolic.
Program substitute_constants(const Program& program, const ConstantBindings& bindings,
                             const std::set<std::string>& parameters = {});

/// Constants neither defined in the program nor bound.
std::set<std::string> undefined_constants(const Program& program, const ConstantBindings& bindings);

}  // namespace stormlet
