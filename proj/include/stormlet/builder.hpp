#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stormlet/model.hpp"
#include "stormlet/prism.hpp"
#include "stormlet/rational_function.hpp"

namespace stormlet {

using Valuation = std::vector<std::int64_t>;

struct BuildOptions {
  bool fix_deadlocks = false;
  ConstantBindings constants;
  /// Undefined constants kept symbolic (parametric builds only).
  std::set<std::string> parameters;
  std::function<void(const std::string&)> on_warning;
};

/// A program after constant substitution and formula inlining, with every
/// variable resolved to its slot in the state valuation.
struct CompiledProgram {
  Program program;
  std::vector<std::string> variables;
  std::vector<bool> is_bool;
  std::vector<std::int64_t> low, high;
  std::vector<std::size_t> owner;  // module index per variable
  std::map<std::string, std::size_t> slot;
  /// Non-silent actions in order of first appearance, with the modules
  /// that own each of them.
  std::vector<std::string> actions;
  std::vector<std::vector<std::size_t>> action_modules;
  std::set<std::string> parameters;
};

CompiledProgram compile_program(const Program& program, const BuildOptions& options);

/// Resolves constants, formulas and variables of the program in an
/// expression written against it (property state formulas).
Expr resolve_expression(const CompiledProgram& program, const Expr& e);

/// Initial valuations in ascending order, first variable most significant.
std::vector<Valuation> enumerate_initial_states(const CompiledProgram& program);

template <typename N>
struct Branch {
  N probability;  // rate for CTMC and Markovian MA choices
  Valuation target;
};

template <typename N>
struct Choice {
  std::string action;
  bool markovian = false;
  /// Index of the command of each participating module, for diagnostics
  /// and action rewards.
  std::vector<std::pair<std::size_t, std::size_t>> commands;
  std::vector<Branch<N>> branches;
};

/// Silent commands first (module order, then command order), then one
/// choice per combination of enabled commands of each action, actions in
/// order of first appearance.
template <typename N>
std::vector<Choice<N>> expand_state(const CompiledProgram& program, const Valuation& state);

/// Reachable-state exploration; see README for the semantics of overlapping
/// DTMC commands, Markov automata and deadlocks. N is double, Rational or
/// RationalFunction.
template <typename N>
Model<N> build_model(const Program& program, const BuildOptions& options = {});

/// Expression value as a number of the domain; parameters become
/// variables of a rational function.
template <typename N>
N evaluate_number(const Expr& e, const Environment& env);

}  // namespace stormlet
