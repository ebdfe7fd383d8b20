#include <fstream>
#include <map>
#include <sstream>

#include "lexer.hpp"
#include "stormlet/prism.hpp"

namespace stormlet {

using detail::Token;
using detail::TokenKind;

namespace {

class ProgramParser : public detail::TokenStream {
 public:
  using TokenStream::TokenStream;

  Program parse() {
    Program program;
    program.kind = parse_model_kind();
    while (!at_end()) {
      if (accept_word("const")) {
        program.constants.push_back(parse_constant(program));
      } else if (accept_word("formula")) {
        FormulaDecl f;
        f.name = expect_identifier();
        expect_symbol("=");
        f.body = parse_expression();
        expect_symbol(";");
        program.formulas.push_back(std::move(f));
      } else if (accept_word("label")) {
        LabelDecl l;
        l.name = expect_string();
        expect_symbol("=");
        l.expression = parse_expression();
        expect_symbol(";");
        program.labels.push_back(std::move(l));
      } else if (accept_word("module")) {
        program.modules.push_back(parse_module(program));
      } else if (accept_word("rewards")) {
        program.rewards.push_back(parse_rewards());
      } else if (is_word("init")) {
        if (program.initial_states) fail_message("duplicate init block");
        next();
        program.initial_states = parse_expression();
        expect_word("endinit");
      } else if (is_word("global") || is_word("system")) {
        fail_message("unsupported feature: '" + peek().text + "' declarations");
      } else {
        fail({"const", "formula", "label", "module", "rewards", "init"});
      }
    }
    return program;
  }

  /// Items of a module body up to (and including) `endmodule`.
  void parse_module_items(Module& module) {
    while (!accept_word("endmodule")) {
      if (peek().kind == TokenKind::Identifier && is_symbol(":", 1)) {
        module.variables.push_back(parse_variable());
      } else if (is_symbol("[") || (markov_automaton_ && is_symbol("<"))) {
        module.commands.push_back(parse_command());
      } else {
        fail({"variable declaration", "command", "endmodule"});
      }
    }
  }

  bool markov_automaton_ = false;

 private:
  ModelKind parse_model_kind() {
    const Token& t = peek();
    static const std::map<std::string, ModelKind> kinds = {
        {"dtmc", ModelKind::Dtmc}, {"probabilistic", ModelKind::Dtmc}, {"ctmc", ModelKind::Ctmc},
        {"stochastic", ModelKind::Ctmc}, {"mdp", ModelKind::Mdp}, {"nondeterministic", ModelKind::Mdp},
        {"ma", ModelKind::Ma}};
    if (t.kind == TokenKind::Identifier) {
      auto it = kinds.find(t.text);
      if (it != kinds.end()) {
        next();
        markov_automaton_ = it->second == ModelKind::Ma;
        return it->second;
      }
      if (!detail::is_keyword(t.text))
        throw ParseError("unknown model kind '" + t.text + "'", t.line, t.column, {"dtmc", "ctmc", "mdp", "ma"});
    }
    fail({"dtmc", "ctmc", "mdp", "ma"});
  }

  ConstantDecl parse_constant(const Program& program) {
    ConstantDecl c;
    std::optional<Type> declared;
    if (accept_word("int")) declared = Type::Int;
    else if (accept_word("double") || accept_word("rate") || accept_word("prob")) declared = Type::Double;
    else if (accept_word("bool")) declared = Type::Bool;
    c.name = expect_identifier();
    if (accept_symbol("=")) c.value = parse_expression();
    expect_symbol(";");
    if (declared) {
      c.type = *declared;
    } else if (c.value) {
      c.type = infer_type(*c.value, [&](const std::string& name) -> std::optional<Type> {
        if (const auto* other = program.find_constant(name)) return other->type;
        return std::nullopt;
      });
    }
    return c;
  }

  VariableDecl parse_variable() {
    VariableDecl v;
    v.name = expect_identifier();
    expect_symbol(":");
    if (accept_word("bool")) {
      v.is_bool = true;
    } else {
      expect_symbol("[");
      v.low = parse_expression();
      expect_symbol("..");
      v.high = parse_expression();
      expect_symbol("]");
    }
    if (accept_word("init")) v.init = parse_expression();
    expect_symbol(";");
    return v;
  }

  Command parse_command() {
    Command c;
    const bool markovian = is_symbol("<");
    next();
    c.markovian = markovian;
    const char* close = markovian ? ">" : "]";
    if (!is_symbol(close)) c.action = expect_identifier();
    expect_symbol(close);
    c.guard = parse_expression();
    expect_symbol("->");
    c.updates.push_back(parse_update());
    while (accept_symbol("+")) c.updates.push_back(parse_update());
    expect_symbol(";");
    return c;
  }

  bool assignment_ahead() const {
    return is_symbol("(") && peek(1).kind == TokenKind::Identifier && is_symbol("'", 2);
  }

  Update parse_update() {
    Update u;
    if (assignment_ahead() || (is_word("true") && (is_symbol(";", 1) || is_symbol("+", 1)))) {
      u.probability = make_literal(Value::of_int(Rational(1)), "1");
    } else {
      u.probability = parse_expression();
      expect_symbol(":");
    }
    if (accept_word("true")) return u;
    do {
      expect_symbol("(");
      Assignment a;
      a.variable = expect_identifier();
      expect_symbol("'");
      expect_symbol("=");
      a.value = parse_expression();
      expect_symbol(")");
      u.assignments.push_back(std::move(a));
    } while (accept_symbol("&"));
    return u;
  }

  RewardStruct parse_rewards() {
    RewardStruct r;
    if (peek().kind == TokenKind::String) r.name = next().text;
    while (!accept_word("endrewards")) {
      RewardItem item;
      if (accept_symbol("[")) {
        item.action = is_symbol("]") ? std::string() : expect_identifier();
        expect_symbol("]");
      }
      item.guard = parse_expression();
      expect_symbol(":");
      item.value = parse_expression();
      expect_symbol(";");
      r.items.push_back(std::move(item));
    }
    return r;
  }

  Module parse_module(const Program& program) {
    Module m;
    m.name = expect_identifier();
    if (accept_symbol("=")) {
      const std::string source = expect_identifier();
      auto range = bodies_.find(source);
      if (range == bodies_.end()) fail_message("renamed module '" + source + "' is not defined");
      std::map<std::string, std::string> renames;
      expect_symbol("[");
      do {
        std::string from = expect_identifier();
        expect_symbol("=");
        std::string to = expect_identifier();
        if (!renames.emplace(from, to).second) fail_message("identifier '" + from + "' renamed twice");
      } while (accept_symbol(","));
      expect_symbol("]");
      expect_word("endmodule");
      // Simultaneous textual substitution over the source module's tokens.
      std::vector<Token> body(tokens().begin() + static_cast<std::ptrdiff_t>(range->second.first),
                              tokens().begin() + static_cast<std::ptrdiff_t>(range->second.second));
      for (auto& t : body) {
        if (t.kind != TokenKind::Identifier) continue;
        if (auto it = renames.find(t.text); it != renames.end()) t.text = it->second;
      }
      body.push_back(Token{TokenKind::End, "", peek().line, peek().column});
      ProgramParser sub(std::move(body));
      sub.markov_automaton_ = markov_automaton_;
      sub.parse_module_items(m);
      (void)program;
      return m;
    }
    const std::size_t begin = position();
    parse_module_items(m);
    bodies_[m.name] = {begin, position()};
    return m;
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> bodies_;
};

void check_program(const Program& p) {
  std::set<std::string> identifiers;
  auto claim = [&](const std::string& name, const char* what) {
    if (!identifiers.insert(name).second)
      throw ModelError("duplicate identifier '" + name + "' (" + what + ")");
  };
  for (const auto& c : p.constants) claim(c.name, "constant");
  for (const auto& f : p.formulas) claim(f.name, "formula");
  std::set<std::string> modules;
  for (const auto& m : p.modules) {
    if (!modules.insert(m.name).second) throw ModelError("duplicate identifier '" + m.name + "' (module)");
    for (const auto& v : m.variables) claim(v.name, "variable");
  }
  std::set<std::string> labels;
  for (const auto& l : p.labels)
    if (!labels.insert(l.name).second) throw ModelError("duplicate identifier '" + l.name + "' (label)");
  std::set<std::string> rewards;
  for (const auto& r : p.rewards)
    if (!r.name.empty() && !rewards.insert(r.name).second)
      throw ModelError("duplicate identifier '" + r.name + "' (reward structure)");

  for (const auto& m : p.modules) {
    std::set<std::string> locals;
    for (const auto& v : m.variables) locals.insert(v.name);
    for (const auto& c : m.commands) {
      if (c.markovian && p.kind != ModelKind::Ma)
        throw ModelError("Markovian command outside a Markov automaton in module '" + m.name + "'");
      for (const auto& u : c.updates) {
        std::set<std::string> assigned;
        for (const auto& a : u.assignments) {
          if (!locals.count(a.variable))
            throw ModelError("module '" + m.name + "' assigns non-local variable '" + a.variable + "'");
          if (!assigned.insert(a.variable).second)
            throw ModelError("variable '" + a.variable + "' assigned twice in one update of module '" +
                             m.name + "'");
        }
      }
    }
  }
}

void print_expr(std::ostream& out, const Expr& e) { out << to_string(e); }

}  // namespace

const ConstantDecl* Program::find_constant(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return &c;
  return nullptr;
}

std::set<std::string> Program::action_names() const {
  std::set<std::string> out;
  for (const auto& m : modules)
    for (const auto& c : m.commands)
      if (!c.action.empty()) out.insert(c.action);
  return out;
}

Program parse_program(std::string_view text) {
  ProgramParser parser(detail::tokenize(text));
  Program p = parser.parse();
  check_program(p);
  return p;
}

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_program(buffer.str());
}

std::string to_string(const Program& p) {
  std::ostringstream out;
  out << to_string(p.kind) << "\n";
  if (!p.constants.empty()) out << "\n";
  for (const auto& c : p.constants) {
    out << "const " << to_string(c.type) << ' ' << c.name;
    if (c.value) {
      out << " = ";
      print_expr(out, *c.value);
    }
    out << ";\n";
  }
  if (!p.formulas.empty()) out << "\n";
  for (const auto& f : p.formulas) {
    out << "formula " << f.name << " = ";
    print_expr(out, f.body);
    out << ";\n";
  }
  for (const auto& m : p.modules) {
    out << "\nmodule " << m.name << "\n";
    for (const auto& v : m.variables) {
      out << "  " << v.name << " : ";
      if (v.is_bool) {
        out << "bool";
      } else {
        out << '[';
        print_expr(out, v.low);
        out << "..";
        print_expr(out, v.high);
        out << ']';
      }
      if (v.init) {
        out << " init ";
        print_expr(out, *v.init);
      }
      out << ";\n";
    }
    for (const auto& c : m.commands) {
      out << "  " << (c.markovian ? '<' : '[') << c.action << (c.markovian ? '>' : ']') << ' ';
      print_expr(out, c.guard);
      out << " -> ";
      for (std::size_t i = 0; i < c.updates.size(); ++i) {
        if (i) out << " + ";
        const auto& u = c.updates[i];
        print_expr(out, u.probability);
        out << " : ";
        if (u.assignments.empty()) out << "true";
        for (std::size_t k = 0; k < u.assignments.size(); ++k) {
          if (k) out << " & ";
          out << '(' << u.assignments[k].variable << "' = ";
          print_expr(out, u.assignments[k].value);
          out << ')';
        }
      }
      out << ";\n";
    }
    out << "endmodule\n";
  }
  if (!p.labels.empty()) out << "\n";
  for (const auto& l : p.labels) {
    out << "label \"" << l.name << "\" = ";
    print_expr(out, l.expression);
    out << ";\n";
  }
  for (const auto& r : p.rewards) {
    out << "\nrewards";
    if (!r.name.empty()) out << " \"" << r.name << '"';
    out << "\n";
    for (const auto& item : r.items) {
      out << "  ";
      if (item.action) out << '[' << *item.action << "] ";
      print_expr(out, item.guard);
      out << " : ";
      print_expr(out, item.value);
      out << ";\n";
    }
    out << "endrewards\n";
  }
  if (p.initial_states) {
    out << "\ninit ";
    print_expr(out, *p.initial_states);
    out << " endinit\n";
  }
  return out.str();
}

}  // namespace stormlet
