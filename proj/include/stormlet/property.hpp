#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stormlet/expression.hpp"

namespace stormlet {

enum class Direction { None, Min, Max };
enum class Comparison { Less, LessEqual, Greater, GreaterEqual };

std::string to_string(Comparison c);

struct Threshold {
  Comparison comparison = Comparison::Less;
  Rational value;
  friend bool operator==(const Threshold&, const Threshold&) = default;
};

enum class PathKind { Next, Until, Eventually, Globally };

/// Upper bound of a path formula: a step count on discrete-time models, a
/// time on CTMCs.
struct PathBound {
  Rational value;
  bool strict = false;  // `<` instead of `<=`
  friend bool operator==(const PathBound&, const PathBound&) = default;
};

struct PathFormula {
  PathKind kind = PathKind::Eventually;
  Expr left;   // Until only
  Expr right;  // the operand of X, F and G
  std::optional<PathBound> bound;
  friend bool operator==(const PathFormula&, const PathFormula&) = default;
};

enum class Operator { Probability, Reward };

struct Property {
  std::string name;
  Operator op = Operator::Probability;
  std::optional<std::string> reward_name;
  Direction direction = Direction::None;
  std::optional<Threshold> threshold;  // unset: `=?`
  PathFormula path;
  /// Set by desugar for `G`: the value is one minus the value of `path`.
  bool complement = false;
  friend bool operator==(const Property&, const Property&) = default;
};

/// One property per line (or separated by `;`), `//` comments, optional
/// `"name":` prefixes.
std::vector<Property> parse_properties(std::string_view text);
Property parse_property(std::string_view text);

std::string to_string(const Property& p);

/// F φ becomes true U φ; G φ becomes the complement of F ¬φ with the
/// direction flipped; constant subformulas are folded. Idempotent.
Property desugar(const Property& p);

/// Whether `value` satisfies the threshold.
template <typename N>
bool satisfies(const Threshold& t, const N& value) {
  const N bound = N(t.value.get_d());
  switch (t.comparison) {
    case Comparison::Less: return value < bound;
    case Comparison::LessEqual: return value <= bound;
    case Comparison::Greater: return value > bound;
    case Comparison::GreaterEqual: return value >= bound;
  }
  return false;
}

template <>
inline bool satisfies<Rational>(const Threshold& t, const Rational& value) {
  switch (t.comparison) {
    case Comparison::Less: return value < t.value;
    case Comparison::LessEqual: return value <= t.value;
    case Comparison::Greater: return value > t.value;
    case Comparison::GreaterEqual: return value >= t.value;
  }
  return false;
}

}  // namespace stormlet
