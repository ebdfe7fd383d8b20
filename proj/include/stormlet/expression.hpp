#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stormlet/number.hpp"

namespace stormlet {

enum class Type { Int, Double, Bool };

std::string to_string(Type t);

/// Result of evaluating an expression. Numbers are exact rationals; `type`
/// keeps the int/double distinction of the language.
struct Value {
  Type type = Type::Int;
  bool boolean = false;
  Rational number;

  static Value of_bool(bool b) { return Value{Type::Bool, b, Rational(0)}; }
  static Value of_int(const Rational& v) { return Value{Type::Int, false, v}; }
  static Value of_double(const Rational& v) { return Value{Type::Double, false, v}; }

  bool as_bool() const;
  const Rational& as_number() const;
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) {
    if (a.type == Type::Bool || b.type == Type::Bool)
      return a.type == b.type && a.boolean == b.boolean;
    return a.number == b.number;
  }
};

struct ExprNode;

/// Immutable, shared expression tree.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  explicit operator bool() const noexcept { return node_ != nullptr; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> node_;
};

enum class UnaryOp { Not, Negate };
enum class BinaryOp { Implies, Iff, Or, And, Eq, Neq, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };
enum class Function { Min, Max, Floor, Ceil, Pow, Mod };

struct LiteralNode {
  Value value;
  std::string text;  // spelling used when printing
};
struct IdentifierNode {
  std::string name;
};
/// Identifier resolved to a slot of the state valuation.
struct VariableNode {
  std::string name;
  std::size_t slot;
  bool is_bool;
};
/// `"label"` atom of a property state formula.
struct LabelNode {
  std::string name;
};
struct UnaryNode {
  UnaryOp op;
  Expr operand;
};
struct BinaryNode {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct IteNode {
  Expr condition;
  Expr then_branch;
  Expr else_branch;
};
struct CallNode {
  Function function;
  std::vector<Expr> arguments;
};

struct ExprNode {
  std::variant<LiteralNode, IdentifierNode, VariableNode, LabelNode, UnaryNode, BinaryNode, IteNode,
               CallNode>
      data;
};

Expr make_literal(Value v, std::string text = {});
Expr make_bool(bool b);
Expr make_int(std::int64_t v);
Expr make_identifier(std::string name);
Expr make_variable(std::string name, std::size_t slot, bool is_bool);
Expr make_label(std::string name);
Expr make_unary(UnaryOp op, Expr operand);
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs);
Expr make_ite(Expr c, Expr t, Expr e);
Expr make_call(Function f, std::vector<Expr> args);

std::string to_string(const Expr& e);
std::string to_string(BinaryOp op);
std::string to_string(Function f);

/// Lookups used during evaluation. Variables are read from `variables`
/// by slot; unresolved identifiers and labels go through the callbacks.
struct Environment {
  std::span<const std::int64_t> variables;
  std::function<std::optional<Value>(const std::string&)> identifier;
  std::function<bool(const std::string&)> label;
};

Value evaluate(const Expr& e, const Environment& env);
bool evaluate_bool(const Expr& e, const Environment& env);

/// Type of an expression; `identifier_type` resolves free identifiers.
Type infer_type(const Expr& e, const std::function<std::optional<Type>(const std::string&)>& identifier_type);

/// Replaces identifiers for which `f` yields an expression.
Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const std::string&)>& f);

/// Folds every subtree free of identifiers, variables and labels into a
/// literal; boolean connectives with a constant operand are simplified.
Expr fold_constants(const Expr& e);

std::set<std::string> identifiers(const Expr& e);
std::set<std::string> labels(const Expr& e);

/// Literal value if the expression is one.
std::optional<Value> literal_value(const Expr& e);

}  // namespace stormlet
