#include "stormlet/expression.hpp"

#include <cmath>
#include <sstream>

#include "stormlet/errors.hpp"

namespace stormlet {

std::string to_string(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Double: return "double";
    case Type::Bool: return "bool";
  }
  return "?";
}

bool Value::as_bool() const {
  if (type != Type::Bool) throw ModelError("expected a boolean value, got " + to_string());
  return boolean;
}

const Rational& Value::as_number() const {
  if (type == Type::Bool) throw ModelError("expected a numeric value, got " + to_string());
  return number;
}

namespace {

/// Decimal spelling when the rational has a terminating expansion.
std::optional<std::string> decimal_spelling(const Rational& q) {
  Integer den = q.get_den();
  unsigned twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) return std::nullopt;
  const unsigned digits = std::max(twos, fives);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  Integer scaled = q.get_num() * (scale / q.get_den());
  const bool negative = sgn(scaled) < 0;
  std::string s = Integer(abs(scaled)).get_str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
  }
  return negative ? "-" + s : s;
}

std::string literal_text(const Value& v) {
  if (v.type == Type::Bool) return v.boolean ? "true" : "false";
  if (v.type == Type::Int) return v.number.get_str();
  if (auto d = decimal_spelling(v.number)) {
    if (d->find('.') == std::string::npos) return *d + ".0";
    return *d;
  }
  return "(" + v.number.get_str() + ")";
}

}  // namespace

std::string Value::to_string() const { return literal_text(*this); }

Expr make_literal(Value v, std::string text) {
  if (text.empty()) text = literal_text(v);
  return Expr(std::make_shared<ExprNode>(ExprNode{LiteralNode{std::move(v), std::move(text)}}));
}
Expr make_bool(bool b) { return make_literal(Value::of_bool(b)); }
Expr make_int(std::int64_t v) { return make_literal(Value::of_int(Rational(static_cast<long>(v)))); }
Expr make_identifier(std::string name) {
  return Expr(std::make_shared<ExprNode>(ExprNode{IdentifierNode{std::move(name)}}));
}
Expr make_variable(std::string name, std::size_t slot, bool is_bool) {
  return Expr(std::make_shared<ExprNode>(ExprNode{VariableNode{std::move(name), slot, is_bool}}));
}
Expr make_label(std::string name) {
  return Expr(std::make_shared<ExprNode>(ExprNode{LabelNode{std::move(name)}}));
}
Expr make_unary(UnaryOp op, Expr operand) {
  return Expr(std::make_shared<ExprNode>(ExprNode{UnaryNode{op, std::move(operand)}}));
}
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<ExprNode>(ExprNode{BinaryNode{op, std::move(lhs), std::move(rhs)}}));
}
Expr make_ite(Expr c, Expr t, Expr e) {
  return Expr(std::make_shared<ExprNode>(ExprNode{IteNode{std::move(c), std::move(t), std::move(e)}}));
}
Expr make_call(Function f, std::vector<Expr> args) {
  return Expr(std::make_shared<ExprNode>(ExprNode{CallNode{f, std::move(args)}}));
}

bool operator==(const Expr& a, const Expr& b) {
  if (!a.node_ || !b.node_) return !a.node_ && !b.node_;
  if (a.node_ == b.node_) return true;
  const auto& x = a.node_->data;
  const auto& y = b.node_->data;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const auto& m = std::get<T>(y);
        if constexpr (std::is_same_v<T, LiteralNode>) {
          return n.value.type == m.value.type && n.value == m.value;
        } else if constexpr (std::is_same_v<T, IdentifierNode> || std::is_same_v<T, LabelNode>) {
          return n.name == m.name;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return n.name == m.name && n.slot == m.slot;
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          return n.op == m.op && n.operand == m.operand;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return n.op == m.op && n.lhs == m.lhs && n.rhs == m.rhs;
        } else if constexpr (std::is_same_v<T, IteNode>) {
          return n.condition == m.condition && n.then_branch == m.then_branch &&
                 n.else_branch == m.else_branch;
        } else {
          return n.function == m.function && n.arguments == m.arguments;
        }
      },
      x);
}

std::string to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return "=>";
    case BinaryOp::Iff: return "<=>";
    case BinaryOp::Or: return "|";
    case BinaryOp::And: return "&";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Neq: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

std::string to_string(Function f) {
  switch (f) {
    case Function::Min: return "min";
    case Function::Max: return "max";
    case Function::Floor: return "floor";
    case Function::Ceil: return "ceil";
    case Function::Pow: return "pow";
    case Function::Mod: return "mod";
  }
  return "?";
}

namespace {

// Precedence levels; must mirror the parser.
constexpr int kIte = 0, kImplies = 1, kIff = 2, kOr = 3, kAnd = 4, kNot = 5, kRel = 6, kAdd = 7,
              kMul = 8, kUnary = 9, kPrimary = 10;

int level(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return kImplies;
    case BinaryOp::Iff: return kIff;
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div: return kMul;
    default: return kRel;
  }
}

void print(std::ostream& out, const Expr& e, int min_level) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiteralNode>) {
          const bool negative = !n.text.empty() && n.text[0] == '-';
          if (negative && min_level > kUnary) out << '(' << n.text << ')';
          else out << n.text;
        } else if constexpr (std::is_same_v<T, IdentifierNode> || std::is_same_v<T, VariableNode>) {
          out << n.name;
        } else if constexpr (std::is_same_v<T, LabelNode>) {
          out << '"' << n.name << '"';
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          const int l = n.op == UnaryOp::Not ? kNot : kUnary;
          if (l < min_level) out << '(';
          out << (n.op == UnaryOp::Not ? "!" : "-");
          print(out, n.operand, l);
          if (l < min_level) out << ')';
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const int l = level(n.op);
          if (l < min_level) out << '(';
          print(out, n.lhs, l == kRel ? l + 1 : l);
          out << ' ' << to_string(n.op) << ' ';
          print(out, n.rhs, l + 1);
          if (l < min_level) out << ')';
        } else if constexpr (std::is_same_v<T, IteNode>) {
          if (kIte < min_level) out << '(';
          print(out, n.condition, kImplies);
          out << " ? ";
          print(out, n.then_branch, kIte);
          out << " : ";
          print(out, n.else_branch, kIte);
          if (kIte < min_level) out << ')';
        } else {
          out << to_string(n.function) << '(';
          for (std::size_t i = 0; i < n.arguments.size(); ++i) {
            if (i) out << ", ";
            print(out, n.arguments[i], kIte);
          }
          out << ')';
        }
      },
      e.node().data);
}

Rational exact_power(const Rational& base, const Integer& exponent) {
  if (!exponent.fits_slong_p()) throw ModelError("exponent too large in pow");
  long k = exponent.get_si();
  if (k < 0 && sgn(base) == 0) throw ModelError("pow: zero raised to a negative power");
  Rational result = 1;
  Rational b = k < 0 ? Rational(1 / base) : base;
  for (long i = 0; i < std::labs(k); ++i) result *= b;
  return result;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
  const Rational& x = a.as_number();
  const Rational& y = b.as_number();
  const bool ints = a.type == Type::Int && b.type == Type::Int;
  switch (op) {
    case BinaryOp::Add: return ints ? Value::of_int(x + y) : Value::of_double(x + y);
    case BinaryOp::Sub: return ints ? Value::of_int(x - y) : Value::of_double(x - y);
    case BinaryOp::Mul: return ints ? Value::of_int(x * y) : Value::of_double(x * y);
    case BinaryOp::Div:
      if (sgn(y) == 0) throw ModelError("division by zero");
      return Value::of_double(x / y);
    default: break;
  }
  throw ModelError("not an arithmetic operator");
}

Value call(Function f, const std::vector<Value>& args) {
  auto arity = [&](std::size_t n) {
    if (args.size() != n)
      throw ModelError(to_string(f) + " expects " + std::to_string(n) + " arguments");
  };
  switch (f) {
    case Function::Min:
    case Function::Max: {
      if (args.size() < 2) throw ModelError(to_string(f) + " expects at least 2 arguments");
      Value best = args[0];
      bool all_int = true;
      for (const auto& a : args) {
        all_int = all_int && a.type == Type::Int;
        if (f == Function::Min ? a.as_number() < best.as_number() : best.as_number() < a.as_number())
          best = a;
      }
      return all_int ? Value::of_int(best.number) : Value::of_double(best.number);
    }
    case Function::Floor:
      arity(1);
      return Value::of_int(Rational(floor(args[0].as_number())));
    case Function::Ceil:
      arity(1);
      return Value::of_int(Rational(ceil(args[0].as_number())));
    case Function::Pow: {
      arity(2);
      const Rational& base = args[0].as_number();
      const Rational& exponent = args[1].as_number();
      if (is_integer(exponent)) {
        Rational r = exact_power(base, exponent.get_num());
        if (args[0].type == Type::Int && args[1].type == Type::Int && sgn(exponent) >= 0)
          return Value::of_int(r);
        return Value::of_double(r);
      }
      return Value::of_double(rational_from_double(std::pow(base.get_d(), exponent.get_d())));
    }
    case Function::Mod: {
      arity(2);
      if (args[0].type != Type::Int || args[1].type != Type::Int)
        throw ModelError("mod expects integer arguments");
      Integer b = args[1].number.get_num();
      if (b == 0) throw ModelError("mod by zero");
      Integer r;
      mpz_fdiv_r(r.get_mpz_t(), args[0].number.get_num_mpz_t(), b.get_mpz_t());
      return Value::of_int(Rational(r));
    }
  }
  throw ModelError("unknown function");
}

}  // namespace

std::string to_string(const Expr& e) {
  if (!e) return "<empty>";
  std::ostringstream out;
  print(out, e, kIte);
  return out.str();
}

Value evaluate(const Expr& e, const Environment& env) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiteralNode>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, IdentifierNode>) {
          if (env.identifier)
            if (auto v = env.identifier(n.name)) return *v;
          throw ModelError("undefined identifier '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          const std::int64_t v = env.variables[n.slot];
          return n.is_bool ? Value::of_bool(v != 0) : Value::of_int(Rational(static_cast<long>(v)));
        } else if constexpr (std::is_same_v<T, LabelNode>) {
          if (!env.label) throw ModelError("label \"" + n.name + "\" not allowed here");
          return Value::of_bool(env.label(n.name));
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          Value v = evaluate(n.operand, env);
          if (n.op == UnaryOp::Not) return Value::of_bool(!v.as_bool());
          Rational neg = -v.as_number();
          return v.type == Type::Int ? Value::of_int(neg) : Value::of_double(neg);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          switch (n.op) {
            case BinaryOp::And:
              return Value::of_bool(evaluate(n.lhs, env).as_bool() && evaluate(n.rhs, env).as_bool());
            case BinaryOp::Or:
              return Value::of_bool(evaluate(n.lhs, env).as_bool() || evaluate(n.rhs, env).as_bool());
            case BinaryOp::Implies:
              return Value::of_bool(!evaluate(n.lhs, env).as_bool() || evaluate(n.rhs, env).as_bool());
            case BinaryOp::Iff:
              return Value::of_bool(evaluate(n.lhs, env).as_bool() == evaluate(n.rhs, env).as_bool());
            default: break;
          }
          Value a = evaluate(n.lhs, env);
          Value b = evaluate(n.rhs, env);
          switch (n.op) {
            case BinaryOp::Eq:
            case BinaryOp::Neq: {
              if ((a.type == Type::Bool) != (b.type == Type::Bool))
                throw ModelError("comparing a boolean with a number in " + to_string(e));
              const bool eq = a == b;
              return Value::of_bool(n.op == BinaryOp::Eq ? eq : !eq);
            }
            case BinaryOp::Lt: return Value::of_bool(a.as_number() < b.as_number());
            case BinaryOp::Le: return Value::of_bool(a.as_number() <= b.as_number());
            case BinaryOp::Gt: return Value::of_bool(a.as_number() > b.as_number());
            case BinaryOp::Ge: return Value::of_bool(a.as_number() >= b.as_number());
            default: return arithmetic(n.op, a, b);
          }
        } else if constexpr (std::is_same_v<T, IteNode>) {
          return evaluate(n.condition, env).as_bool() ? evaluate(n.then_branch, env)
                                                      : evaluate(n.else_branch, env);
        } else {
          std::vector<Value> args;
          args.reserve(n.arguments.size());
          for (const auto& a : n.arguments) args.push_back(evaluate(a, env));
          return call(n.function, args);
        }
      },
      e.node().data);
}

bool evaluate_bool(const Expr& e, const Environment& env) { return evaluate(e, env).as_bool(); }

Type infer_type(const Expr& e, const std::function<std::optional<Type>(const std::string&)>& identifier_type) {
  auto numeric = [&](Type t, const Expr& where) {
    if (t == Type::Bool) throw ModelError("expected a numeric operand in " + to_string(where));
  };
  return std::visit(
      [&](const auto& n) -> Type {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiteralNode>) {
          return n.value.type;
        } else if constexpr (std::is_same_v<T, IdentifierNode>) {
          if (identifier_type)
            if (auto t = identifier_type(n.name)) return *t;
          throw ModelError("undefined identifier '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return n.is_bool ? Type::Bool : Type::Int;
        } else if constexpr (std::is_same_v<T, LabelNode>) {
          return Type::Bool;
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          Type t = infer_type(n.operand, identifier_type);
          if (n.op == UnaryOp::Not) {
            if (t != Type::Bool) throw ModelError("'!' applied to a number in " + to_string(e));
            return Type::Bool;
          }
          numeric(t, e);
          return t;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          Type a = infer_type(n.lhs, identifier_type);
          Type b = infer_type(n.rhs, identifier_type);
          switch (n.op) {
            case BinaryOp::And:
            case BinaryOp::Or:
            case BinaryOp::Implies:
            case BinaryOp::Iff:
              if (a != Type::Bool || b != Type::Bool)
                throw ModelError("boolean operator applied to numbers in " + to_string(e));
              return Type::Bool;
            case BinaryOp::Eq:
            case BinaryOp::Neq:
              if ((a == Type::Bool) != (b == Type::Bool))
                throw ModelError("comparing a boolean with a number in " + to_string(e));
              return Type::Bool;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
              numeric(a, e);
              numeric(b, e);
              return Type::Bool;
            case BinaryOp::Div:
              numeric(a, e);
              numeric(b, e);
              return Type::Double;
            default:
              numeric(a, e);
              numeric(b, e);
              return a == Type::Int && b == Type::Int ? Type::Int : Type::Double;
          }
        } else if constexpr (std::is_same_v<T, IteNode>) {
          if (infer_type(n.condition, identifier_type) != Type::Bool)
            throw ModelError("condition is not boolean in " + to_string(e));
          Type a = infer_type(n.then_branch, identifier_type);
          Type b = infer_type(n.else_branch, identifier_type);
          if (a == b) return a;
          if (a == Type::Bool || b == Type::Bool)
            throw ModelError("branches of different types in " + to_string(e));
          return Type::Double;
        } else {
          bool all_int = true;
          for (const auto& arg : n.arguments) {
            Type t = infer_type(arg, identifier_type);
            numeric(t, e);
            all_int = all_int && t == Type::Int;
          }
          switch (n.function) {
            case Function::Floor:
            case Function::Ceil: return Type::Int;
            case Function::Mod: return Type::Int;
            default: return all_int ? Type::Int : Type::Double;
          }
        }
      },
      e.node().data);
}

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const std::string&)>& f) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IdentifierNode>) {
          if (auto r = f(n.name)) return *r;
          return e;
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          return make_unary(n.op, substitute(n.operand, f));
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return make_binary(n.op, substitute(n.lhs, f), substitute(n.rhs, f));
        } else if constexpr (std::is_same_v<T, IteNode>) {
          return make_ite(substitute(n.condition, f), substitute(n.then_branch, f),
                          substitute(n.else_branch, f));
        } else if constexpr (std::is_same_v<T, CallNode>) {
          std::vector<Expr> args;
          for (const auto& a : n.arguments) args.push_back(substitute(a, f));
          return make_call(n.function, std::move(args));
        } else {
          return e;
        }
      },
      e.node().data);
}

std::optional<Value> literal_value(const Expr& e) {
  if (const auto* lit = std::get_if<LiteralNode>(&e.node().data)) return lit->value;
  return std::nullopt;
}

Expr fold_constants(const Expr& e) {
  auto fold_literal = [](const Expr& x) -> Expr {
    Environment empty;
    return make_literal(evaluate(x, empty));
  };
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnaryNode>) {
          Expr operand = fold_constants(n.operand);
          Expr out = make_unary(n.op, operand);
          return literal_value(operand) ? fold_literal(out) : out;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          Expr lhs = fold_constants(n.lhs);
          Expr rhs = fold_constants(n.rhs);
          auto lv = literal_value(lhs);
          auto rv = literal_value(rhs);
          Expr out = make_binary(n.op, lhs, rhs);
          if (lv && rv) return fold_literal(out);
          auto constant = lv ? lv : rv;
          const Expr& other = lv ? rhs : lhs;
          if (constant && constant->type == Type::Bool) {
            if (n.op == BinaryOp::And) return constant->boolean ? other : make_bool(false);
            if (n.op == BinaryOp::Or) return constant->boolean ? make_bool(true) : other;
          }
          return out;
        } else if constexpr (std::is_same_v<T, IteNode>) {
          Expr c = fold_constants(n.condition);
          Expr t = fold_constants(n.then_branch);
          Expr f = fold_constants(n.else_branch);
          if (auto cv = literal_value(c)) return cv->as_bool() ? t : f;
          return make_ite(c, t, f);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          std::vector<Expr> args;
          bool all = true;
          for (const auto& a : n.arguments) {
            args.push_back(fold_constants(a));
            all = all && literal_value(args.back()).has_value();
          }
          Expr out = make_call(n.function, std::move(args));
          return all ? fold_literal(out) : out;
        } else {
          return e;
        }
      },
      e.node().data);
}

namespace {

template <typename Node>
void collect(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Node>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          collect<Node>(n.operand, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          collect<Node>(n.lhs, out);
          collect<Node>(n.rhs, out);
        } else if constexpr (std::is_same_v<T, IteNode>) {
          collect<Node>(n.condition, out);
          collect<Node>(n.then_branch, out);
          collect<Node>(n.else_branch, out);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          for (const auto& a : n.arguments) collect<Node>(a, out);
        }
      },
      e.node().data);
}

}  // namespace

std::set<std::string> identifiers(const Expr& e) {
  std::set<std::string> out;
  collect<IdentifierNode>(e, out);
  return out;
}

std::set<std::string> labels(const Expr& e) {
  std::set<std::string> out;
  collect<LabelNode>(e, out);
  return out;
}

}  // namespace stormlet
