#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stormlet/errors.hpp"
#include "stormlet/expression.hpp"

namespace stormlet::detail {

enum class TokenKind { Identifier, Number, String, Symbol, End };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view input);

/// Recursive-descent expression parsing shared by the program and property
/// parsers. Precedence, lowest first:
///   c ? a : b,  =>,  <=>,  |,  &,  !,  relations,  + -,  * /,  unary -.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  virtual ~TokenStream() = default;

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::Symbol && peek(ahead).text == s;
  }
  bool is_word(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::Identifier && peek(ahead).text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view s) {
    if (!is_word(s)) return false;
    next();
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail({std::string(s)});
  }
  void expect_word(std::string_view s) {
    if (!accept_word(s)) fail({std::string(s)});
  }
  std::string expect_identifier();
  std::string expect_string();

  [[noreturn]] void fail(std::vector<std::string> expected) const;
  [[noreturn]] void fail_message(const std::string& message) const;

  std::size_t position() const noexcept { return pos_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }

  Expr parse_expression();

 protected:
  /// Hook for `"label"` atoms; the program parser rejects them.
  virtual bool labels_allowed() const { return false; }
  /// Hook for operators a derived grammar treats specially in primary
  /// position (the property parser rejects nested P/R operators).
  virtual void check_primary() {}

 private:
  Expr parse_ite();
  Expr parse_implies();
  Expr parse_iff();
  Expr parse_or();
  Expr parse_and();
  Expr parse_not();
  Expr parse_relation();
  Expr parse_additive();
  Expr parse_multiplicative();
  Expr parse_unary();
  Expr parse_primary();

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_keyword(std::string_view word);

}  // namespace stormlet::detail
