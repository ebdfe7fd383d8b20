#include "lexer.hpp"

#include <array>
#include <cctype>

namespace stormlet::detail {

namespace {

constexpr std::array<std::string_view, 9> kMultiSymbols = {"<=>", "->", "=>", "<=", ">=", "!=", "..", "=?", "||"};
constexpr std::string_view kSingleSymbols = "()[]{};:,+-*/=<>!&|?'\"";

constexpr std::array<std::string_view, 30> kKeywords = {
    "dtmc", "ctmc", "mdp", "ma", "probabilistic", "stochastic", "nondeterministic", "const",
    "int", "double", "bool", "rate", "prob", "formula", "label", "module", "endmodule",
    "rewards", "endrewards", "init", "endinit", "true", "false", "min", "max", "floor", "ceil",
    "pow", "mod", "global"};

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords)
    if (k == word) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view in) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (in[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < in.size()) {
    const char c = in[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < in.size() && in[i + 1] == '/') {
      while (i < in.size() && in[i] != '\n') advance(1);
      continue;
    }
    const std::size_t tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < in.size() && (std::isalnum(static_cast<unsigned char>(in[j])) || in[j] == '_')) ++j;
      out.push_back({TokenKind::Identifier, std::string(in.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    const bool leading_dot = c == '.' && i + 1 < in.size() && std::isdigit(static_cast<unsigned char>(in[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || leading_dot) {
      std::size_t j = i;
      while (j < in.size() && std::isdigit(static_cast<unsigned char>(in[j]))) ++j;
      if (j < in.size() && in[j] == '.' && !(j + 1 < in.size() && in[j + 1] == '.')) {
        ++j;
        while (j < in.size() && std::isdigit(static_cast<unsigned char>(in[j]))) ++j;
      }
      if (j < in.size() && (in[j] == 'e' || in[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < in.size() && (in[k] == '+' || in[k] == '-')) ++k;
        if (k < in.size() && std::isdigit(static_cast<unsigned char>(in[k]))) {
          while (k < in.size() && std::isdigit(static_cast<unsigned char>(in[k]))) ++k;
          j = k;
        }
      }
      out.push_back({TokenKind::Number, std::string(in.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < in.size() && in[j] != '"' && in[j] != '\n') ++j;
      if (j >= in.size() || in[j] != '"') throw ParseError("unterminated string", tl, tc, {"\""});
      out.push_back({TokenKind::String, std::string(in.substr(i + 1, j - i - 1)), tl, tc});
      advance(j - i + 1);
      continue;
    }
    bool matched = false;
    for (auto sym : kMultiSymbols) {
      if (in.substr(i, sym.size()) == sym) {
        out.push_back({TokenKind::Symbol, std::string(sym), tl, tc});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingleSymbols.find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({TokenKind::End, "", line, col});
  return out;
}

std::string TokenStream::expect_identifier() {
  if (peek().kind != TokenKind::Identifier || is_keyword(peek().text)) fail({"identifier"});
  return next().text;
}

std::string TokenStream::expect_string() {
  if (peek().kind != TokenKind::String) fail({"string"});
  return next().text;
}

void TokenStream::fail(std::vector<std::string> expected) const {
  const Token& t = peek();
  std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
  std::string message = "unexpected " + found + ", expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) message += " or ";
    message += expected[i];
  }
  throw ParseError(message, t.line, t.column, std::move(expected));
}

void TokenStream::fail_message(const std::string& message) const {
  throw ParseError(message, peek().line, peek().column);
}

Expr TokenStream::parse_expression() { return parse_ite(); }

Expr TokenStream::parse_ite() {
  Expr c = parse_implies();
  if (accept_symbol("?")) {
    Expr t = parse_ite();
    expect_symbol(":");
    Expr e = parse_ite();
    return make_ite(std::move(c), std::move(t), std::move(e));
  }
  return c;
}

Expr TokenStream::parse_implies() {
  Expr lhs = parse_iff();
  while (accept_symbol("=>")) lhs = make_binary(BinaryOp::Implies, lhs, parse_iff());
  return lhs;
}

Expr TokenStream::parse_iff() {
  Expr lhs = parse_or();
  while (accept_symbol("<=>")) lhs = make_binary(BinaryOp::Iff, lhs, parse_or());
  return lhs;
}

Expr TokenStream::parse_or() {
  Expr lhs = parse_and();
  while (accept_symbol("|")) lhs = make_binary(BinaryOp::Or, lhs, parse_and());
  return lhs;
}

Expr TokenStream::parse_and() {
  Expr lhs = parse_not();
  while (accept_symbol("&")) lhs = make_binary(BinaryOp::And, lhs, parse_not());
  return lhs;
}

Expr TokenStream::parse_not() {
  if (accept_symbol("!")) return make_unary(UnaryOp::Not, parse_not());
  return parse_relation();
}

Expr TokenStream::parse_relation() {
  Expr lhs = parse_additive();
  static const std::array<std::pair<std::string_view, BinaryOp>, 6> ops = {{{"=", BinaryOp::Eq},
                                                                            {"!=", BinaryOp::Neq},
                                                                            {"<=", BinaryOp::Le},
                                                                            {">=", BinaryOp::Ge},
                                                                            {"<", BinaryOp::Lt},
                                                                            {">", BinaryOp::Gt}}};
  for (const auto& [sym, op] : ops) {
    if (is_symbol(sym)) {
      next();
      return make_binary(op, lhs, parse_additive());
    }
  }
  return lhs;
}

Expr TokenStream::parse_additive() {
  Expr lhs = parse_multiplicative();
  for (;;) {
    if (accept_symbol("+")) lhs = make_binary(BinaryOp::Add, lhs, parse_multiplicative());
    else if (accept_symbol("-")) lhs = make_binary(BinaryOp::Sub, lhs, parse_multiplicative());
    else return lhs;
  }
}

Expr TokenStream::parse_multiplicative() {
  Expr lhs = parse_unary();
  for (;;) {
    if (accept_symbol("*")) lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
    else if (accept_symbol("/")) lhs = make_binary(BinaryOp::Div, lhs, parse_unary());
    else return lhs;
  }
}

Expr TokenStream::parse_unary() {
  if (accept_symbol("-")) return make_unary(UnaryOp::Negate, parse_unary());
  return parse_primary();
}

Expr TokenStream::parse_primary() {
  check_primary();
  const Token& t = peek();
  if (t.kind == TokenKind::Number) {
    next();
    Rational v = parse_rational(t.text);
    const bool is_int = t.text.find_first_of(".eE") == std::string::npos;
    return make_literal(is_int ? Value::of_int(v) : Value::of_double(v), t.text);
  }
  if (t.kind == TokenKind::String) {
    if (!labels_allowed()) fail_message("label \"" + t.text + "\" not allowed in this context");
    next();
    return make_label(t.text);
  }
  if (accept_symbol("(")) {
    Expr e = parse_expression();
    expect_symbol(")");
    return e;
  }
  if (t.kind == TokenKind::Identifier) {
    if (accept_word("true")) return make_bool(true);
    if (accept_word("false")) return make_bool(false);
    static const std::array<std::pair<std::string_view, Function>, 6> fns = {{{"min", Function::Min},
                                                                             {"max", Function::Max},
                                                                             {"floor", Function::Floor},
                                                                             {"ceil", Function::Ceil},
                                                                             {"pow", Function::Pow},
                                                                             {"mod", Function::Mod}}};
    for (const auto& [name, fn] : fns) {
      if (t.text == name && is_symbol("(", 1)) {
        next();
        next();
        std::vector<Expr> args;
        args.push_back(parse_expression());
        while (accept_symbol(",")) args.push_back(parse_expression());
        expect_symbol(")");
        return make_call(fn, std::move(args));
      }
    }
    return make_identifier(expect_identifier());
  }
  fail({"expression"});
}

}  // namespace stormlet::detail
