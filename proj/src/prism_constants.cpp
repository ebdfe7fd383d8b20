#include <map>

#include "lexer.hpp"
#include "stormlet/prism.hpp"

namespace stormlet {

namespace {

Value coerce(const std::string& name, Type declared, const Value& v) {
  if (declared == Type::Bool) {
    if (v.type != Type::Bool) throw ModelError("constant '" + name + "' must be boolean");
    return v;
  }
  if (v.type == Type::Bool) throw ModelError("constant '" + name + "' must be numeric");
  if (declared == Type::Int) {
    if (v.as_number().get_den() != 1)
      throw ModelError("constant '" + name + "' is int but has value " + v.to_string());
    return Value::of_int(v.as_number());
  }
  return Value::of_double(v.as_number());
}

template <typename F>
void for_each_expression(Program& p, F&& f) {
  for (auto& c : p.formulas) f(c.body);
  for (auto& m : p.modules) {
    for (auto& v : m.variables) {
      if (v.low) f(v.low);
      if (v.high) f(v.high);
      if (v.init) f(*v.init);
    }
    for (auto& c : m.commands) {
      f(c.guard);
      for (auto& u : c.updates) {
        f(u.probability);
        for (auto& a : u.assignments) f(a.value);
      }
    }
  }
  for (auto& l : p.labels) f(l.expression);
  for (auto& r : p.rewards)
    for (auto& item : r.items) {
      f(item.guard);
      f(item.value);
    }
  if (p.initial_states) f(*p.initial_states);
}

}  // namespace

ConstantBindings parse_constant_bindings(std::string_view text) {
  ConstantBindings out;
  detail::TokenStream ts(detail::tokenize(text));
  while (!ts.at_end()) {
    const std::string name = ts.expect_identifier();
    ts.expect_symbol("=");
    Expr e = fold_constants(ts.parse_expression());
    auto v = literal_value(e);
    if (!v) ts.fail_message("value of constant '" + name + "' is not a constant expression");
    if (!out.emplace(name, *v).second) ts.fail_message("constant '" + name + "' bound twice");
    if (!ts.at_end()) ts.expect_symbol(",");
  }
  return out;
}

std::set<std::string> undefined_constants(const Program& program, const ConstantBindings& bindings) {
  std::set<std::string> out;
  for (const auto& c : program.constants)
    if (!c.value && !bindings.count(c.name)) out.insert(c.name);
  return out;
}

Program substitute_constants(const Program& program, const ConstantBindings& bindings,
                             const std::set<std::string>& parameters) {
  for (const auto& [name, value] : bindings) {
    const ConstantDecl* decl = program.find_constant(name);
    if (!decl) throw ModelError("unknown constant '" + name + "'");
    if (decl->value) throw ModelError("constant '" + name + "' is already defined in the model");
  }
  std::map<std::string, Expr> known;
  auto lookup = [&](const std::string& id) -> std::optional<Expr> {
    if (auto it = known.find(id); it != known.end()) return it->second;
    return std::nullopt;
  };

  Program out = program;
  for (auto& c : out.constants) {
    if (auto it = bindings.find(c.name); it != bindings.end()) {
      Value v = coerce(c.name, c.type, it->second);
      known[c.name] = make_literal(v);
      c.value = known[c.name];
      continue;
    }
    if (!c.value) {
      if (parameters.count(c.name)) continue;
      throw ModelError("constant '" + c.name + "' is undefined");
    }
    Expr folded = fold_constants(substitute(*c.value, lookup));
    auto v = literal_value(folded);
    if (!v) {
      for (const auto& id : identifiers(folded))
        if (parameters.count(id))
          throw UnsupportedError("constant '" + c.name + "' depends on parameter '" + id + "'");
      throw ModelError("constant '" + c.name + "' depends on unknown identifier '" + *identifiers(folded).begin() +
                       "'");
    }
    known[c.name] = make_literal(coerce(c.name, c.type, *v));
    c.value = known[c.name];
  }
  for_each_expression(out, [&](Expr& e) { e = fold_constants(substitute(e, lookup)); });
  return out;
}

}  // namespace stormlet
