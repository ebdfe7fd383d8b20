#include "stormlet/property.hpp"

#include <array>

#include "lexer.hpp"

namespace stormlet {

using detail::Token;
using detail::TokenKind;

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::Less: return "<";
    case Comparison::LessEqual: return "<=";
    case Comparison::Greater: return ">";
    case Comparison::GreaterEqual: return ">=";
  }
  return "?";
}

namespace {

std::string number_text(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  std::string t = Value::of_double(q).to_string();
  if (t.front() == '(') return t.substr(1, t.size() - 2);
  return t;
}

bool is_comparison(const Token& t) {
  return t.kind == TokenKind::Symbol && (t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=");
}

Comparison comparison_of(const std::string& s) {
  if (s == "<") return Comparison::Less;
  if (s == "<=") return Comparison::LessEqual;
  if (s == ">") return Comparison::Greater;
  return Comparison::GreaterEqual;
}

bool is_operator_word(const std::string& w) {
  static const std::array<std::string_view, 8> words = {"P", "Pmin", "Pmax", "R", "Rmin", "Rmax", "S", "LRA"};
  for (auto x : words)
    if (x == w) return true;
  return false;
}

class PropertyParser : public detail::TokenStream {
 public:
  using TokenStream::TokenStream;

  std::vector<Property> parse_all() {
    std::vector<Property> out;
    while (!at_end()) {
      if (accept_symbol(";")) continue;
      const std::size_t line = peek().line;
      out.push_back(parse_one());
      if (!at_end() && !is_symbol(";") && peek().line == line) fail({";", "end of line"});
    }
    return out;
  }

 protected:
  bool labels_allowed() const override { return true; }

  void check_primary() override {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) return;
    if (t.text == "multi" && is_symbol("(", 1)) unsupported("multi-objective queries (multi)");
    if (t.text == "quantile" && is_symbol("(", 1)) unsupported("quantile queries");
    if (t.text == "filter" && is_symbol("(", 1)) unsupported("filter expressions");
    if (!is_operator_word(t.text)) return;
    const bool nested = is_symbol("=?", 1) || is_symbol("{", 1) || is_symbol("[", 1) ||
                        (is_comparison(peek(1)) && peek(2).kind == TokenKind::Number && is_symbol("[", 3));
    if (nested) unsupported("nested " + t.text + " operator inside a state formula");
  }

 private:
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedError("unsupported feature: " + what + " (line " + std::to_string(peek().line) + ")");
  }

  Property parse_one() {
    Property p;
    if (peek().kind == TokenKind::String && is_symbol(":", 1)) {
      p.name = next().text;
      next();
    }
    check_primary_operator();
    const Token head = next();
    if (head.text == "P" || head.text == "Pmin" || head.text == "Pmax") {
      p.op = Operator::Probability;
      if (head.text == "Pmin") p.direction = Direction::Min;
      if (head.text == "Pmax") p.direction = Direction::Max;
    } else {
      p.op = Operator::Reward;
      if (head.text == "Rmin") p.direction = Direction::Min;
      if (head.text == "Rmax") p.direction = Direction::Max;
      if (accept_symbol("{")) {
        p.reward_name = expect_string();
        expect_symbol("}");
      }
      if (p.direction == Direction::None) {
        if (accept_word("min")) p.direction = Direction::Min;
        else if (accept_word("max")) p.direction = Direction::Max;
      }
    }
    if (!accept_symbol("=?")) {
      if (!is_comparison(peek())) fail({"=?", "<", "<=", ">", ">="});
      Threshold t;
      t.comparison = comparison_of(next().text);
      t.value = parse_number("threshold");
      if (p.op == Operator::Probability && (t.value < 0 || t.value > 1))
        fail_message("probability threshold outside [0,1]");
      if (p.op == Operator::Reward && t.value < 0) fail_message("negative reward threshold");
      if (is_symbol("=?")) fail_message("a bounded property cannot also be a query (=?)");
      p.threshold = t;
    }
    expect_symbol("[");
    p.path = p.op == Operator::Probability ? parse_path() : parse_reward_path();
    if (is_symbol("||")) unsupported("conditional properties (||)");
    expect_symbol("]");
    return p;
  }

  void check_primary_operator() {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) fail({"P", "Pmin", "Pmax", "R", "Rmin", "Rmax"});
    if (t.text == "S") unsupported("long-run S operator");
    if (t.text == "LRA") unsupported("long-run average (LRA)");
    if (t.text == "multi") unsupported("multi-objective queries (multi)");
    if (t.text == "quantile") unsupported("quantile queries");
    if (t.text == "filter") unsupported("filter expressions");
    if (t.text == "T" || t.text == "Tmin" || t.text == "Tmax") unsupported("expected time operator " + t.text);
    if (t.text != "P" && t.text != "Pmin" && t.text != "Pmax" && t.text != "R" && t.text != "Rmin" &&
        t.text != "Rmax")
      fail({"P", "Pmin", "Pmax", "R", "Rmin", "Rmax"});
  }

  Rational parse_number(const char* what) {
    Expr e = fold_constants(parse_additive_only());
    auto v = literal_value(e);
    if (!v || v->type == Type::Bool) fail_message(std::string(what) + " must be a constant number");
    return v->as_number();
  }

  // Bounds and thresholds are plain numbers, possibly a fraction.
  Expr parse_additive_only() {
    const Token& t = peek();
    if (t.kind != TokenKind::Number && !is_symbol("(")) fail({"number"});
    if (accept_symbol("(")) {
      Expr e = parse_expression();
      expect_symbol(")");
      return e;
    }
    Expr e = make_literal(
        t.text.find_first_of(".eE") == std::string::npos ? Value::of_int(parse_rational(t.text))
                                                         : Value::of_double(parse_rational(t.text)),
        t.text);
    next();
    if (accept_symbol("/")) {
      const Token& d = peek();
      if (d.kind != TokenKind::Number) fail({"number"});
      next();
      e = make_binary(BinaryOp::Div, e, make_literal(Value::of_int(parse_rational(d.text)), d.text));
    }
    return e;
  }

  std::optional<PathBound> parse_bound() {
    if (is_symbol("[")) unsupported("interval bounds on path formulas");
    if (is_symbol("{")) unsupported("cost bounds on path formulas");
    if (is_symbol(">") || is_symbol(">=")) unsupported("lower bounds on path formulas");
    if (is_symbol("=")) unsupported("point bounds on path formulas");
    PathBound b;
    if (accept_symbol("<=")) {
      b.strict = false;
    } else if (accept_symbol("<")) {
      b.strict = true;
    } else {
      return std::nullopt;
    }
    b.value = parse_number("path bound");
    if (b.value < 0) fail_message("negative path bound");
    return b;
  }

  PathFormula parse_path() {
    PathFormula f;
    if (accept_word("X")) {
      f.kind = PathKind::Next;
      f.right = parse_state();
      return f;
    }
    if (accept_word("F")) {
      f.kind = PathKind::Eventually;
      f.bound = parse_bound();
      f.right = parse_state();
      return f;
    }
    if (accept_word("G")) {
      f.kind = PathKind::Globally;
      f.bound = parse_bound();
      f.right = parse_state();
      return f;
    }
    if (is_word("W") || is_word("R")) unsupported("weak until / release");
    f.left = parse_state();
    if (is_word("W") || is_word("R")) unsupported("weak until / release");
    if (!accept_word("U")) fail({"U", "]"});
    f.kind = PathKind::Until;
    f.bound = parse_bound();
    f.right = parse_state();
    return f;
  }

  PathFormula parse_reward_path() {
    if (is_word("C")) unsupported("cumulative reward (C)");
    if (is_word("I")) unsupported("instantaneous reward (I)");
    if (is_word("S")) unsupported("long-run reward (S)");
    if (is_word("LRA")) unsupported("long-run average (LRA)");
    if (!accept_word("F")) fail({"F"});
    PathFormula f;
    f.kind = PathKind::Eventually;
    if (is_symbol("<") || is_symbol("<=")) unsupported("bounded reachability rewards");
    f.bound = parse_bound();
    f.right = parse_state();
    return f;
  }

  Expr parse_state() {
    Expr e = parse_expression();
    return e;
  }
};

std::string bound_text(const std::optional<PathBound>& b) {
  if (!b) return "";
  return std::string(b->strict ? "<" : "<=") + number_text(b->value);
}

}  // namespace

std::vector<Property> parse_properties(std::string_view text) {
  PropertyParser parser(detail::tokenize(text));
  return parser.parse_all();
}

Property parse_property(std::string_view text) {
  auto all = parse_properties(text);
  if (all.size() != 1)
    throw ParseError("expected exactly one property, found " + std::to_string(all.size()), 1, 1);
  return all.front();
}

std::string to_string(const Property& p) {
  std::string out;
  if (!p.name.empty()) out += "\"" + p.name + "\": ";
  out += p.op == Operator::Probability ? "P" : "R";
  if (p.reward_name) out += "{\"" + *p.reward_name + "\"}";
  // A desugared G is printed in its original form, with the original direction.
  Direction d = p.direction;
  if (p.complement && d != Direction::None) d = d == Direction::Min ? Direction::Max : Direction::Min;
  if (d == Direction::Min) out += "min";
  if (d == Direction::Max) out += "max";
  if (p.threshold) out += to_string(p.threshold->comparison) + number_text(p.threshold->value);
  else out += "=?";
  out += " [";
  const auto& f = p.path;
  if (p.complement) {
    out += "G" + bound_text(f.bound) + " ";
    Expr inner = f.right;
    if (const auto* u = std::get_if<UnaryNode>(&inner.node().data); u && u->op == UnaryOp::Not)
      inner = u->operand;
    else
      inner = make_unary(UnaryOp::Not, inner);
    out += to_string(inner);
  } else {
    switch (f.kind) {
      case PathKind::Next: out += "X " + to_string(f.right); break;
      case PathKind::Eventually: out += "F" + bound_text(f.bound) + " " + to_string(f.right); break;
      case PathKind::Globally: out += "G" + bound_text(f.bound) + " " + to_string(f.right); break;
      case PathKind::Until:
        out += to_string(f.left) + " U" + bound_text(f.bound) + " " + to_string(f.right);
        break;
    }
  }
  out += "]";
  return out;
}

Property desugar(const Property& p) {
  Property out = p;
  auto& f = out.path;
  if (f.left) f.left = fold_constants(f.left);
  f.right = fold_constants(f.right);
  if (f.kind == PathKind::Eventually) {
    f.kind = PathKind::Until;
    f.left = make_bool(true);
  } else if (f.kind == PathKind::Globally) {
    if (p.op == Operator::Reward) throw UnsupportedError("unsupported feature: G inside a reward operator");
    f.kind = PathKind::Until;
    f.left = make_bool(true);
    f.right = fold_constants(make_unary(UnaryOp::Not, f.right));
    out.complement = !out.complement;
    if (out.direction == Direction::Min) out.direction = Direction::Max;
    else if (out.direction == Direction::Max) out.direction = Direction::Min;
  }
  return out;
}

}  // namespace stormlet
