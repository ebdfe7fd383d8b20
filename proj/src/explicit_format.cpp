#include "stormlet/explicit_format.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace stormlet {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string out = hash == std::string::npos ? line : line.substr(0, hash);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 1, start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back({number++, std::string(text.substr(start, end - start))});
    start = end + 1;
  }
  return out;
}

[[noreturn]] void malformed(const char* file, const Line& line, const std::string& why) {
  throw ParseError(std::string(file) + " line " + std::to_string(line.number) + ": " + why + ": '" + line.text +
                       "'",
                   line.number, 1);
}

std::vector<std::string> fields(const char* file, const Line& line, const std::string& content) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto space = content.find(' ', start);
    std::string field = content.substr(start, space == std::string::npos ? std::string::npos : space - start);
    if (field.empty()) malformed(file, line, "empty field");
    out.push_back(std::move(field));
    if (space == std::string::npos) return out;
    start = space + 1;
  }
}

std::size_t parse_index(const char* file, const Line& line, const std::string& field) {
  if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
    malformed(file, line, "expected a non-negative integer, found '" + field + "'");
  try {
    return std::stoull(field);
  } catch (const std::exception&) {
    malformed(file, line, "index out of range");
  }
}

Rational parse_value(const char* file, const Line& line, const std::string& field) {
  if (!is_number_literal(field)) malformed(file, line, "expected a number, found '" + field + "'");
  return parse_rational(field);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

ExplicitTables parse_explicit(std::string_view tra, std::string_view lab, std::optional<std::string_view> rew) {
  ExplicitTables t;
  const auto tra_lines = lines_of(tra);
  std::size_t i = 0;
  std::string header;
  for (; i < tra_lines.size(); ++i) {
    header = strip_comment(tra_lines[i].text);
    if (!header.empty()) break;
  }
  if (header == "dtmc") t.kind = ModelKind::Dtmc;
  else if (header == "ctmc") t.kind = ModelKind::Ctmc;
  else if (header == "mdp") t.kind = ModelKind::Mdp;
  else if (i < tra_lines.size()) malformed(".tra", tra_lines[i], "expected model kind dtmc, ctmc or mdp");
  else throw ParseError(".tra: missing model kind", 1, 1, {"dtmc", "ctmc", "mdp"});

  const bool mdp = t.kind == ModelKind::Mdp;
  // (state, choice) -> list of (dst, value)
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, Rational>>> rows;
  std::size_t max_state = 0;
  bool any = false;
  for (++i; i < tra_lines.size(); ++i) {
    const Line& line = tra_lines[i];
    const std::string content = strip_comment(line.text);
    if (content.empty()) continue;
    auto f = fields(".tra", line, content);
    if (f.size() != (mdp ? 4u : 3u))
      malformed(".tra", line, mdp ? "expected 'src choice dst prob'" : "expected 'src dst value'");
    const std::size_t src = parse_index(".tra", line, f[0]);
    const std::size_t choice = mdp ? parse_index(".tra", line, f[1]) : 0;
    const std::size_t dst = parse_index(".tra", line, f[mdp ? 2 : 1]);
    Rational v = parse_value(".tra", line, f[mdp ? 3 : 2]);
    if (t.kind == ModelKind::Ctmc) {
      if (v < 0) malformed(".tra", line, "negative rate");
    } else if (v < 0 || v > 1) {
      malformed(".tra", line, "probability outside [0,1]");
    }
    rows[{src, choice}].emplace_back(dst, std::move(v));
    max_state = std::max({max_state, src, dst});
    any = true;
  }
  if (!any) throw ParseError(".tra: no transitions", tra_lines.size(), 1);
  t.states = max_state + 1;

  t.choices.state_offsets.assign(1, 0);
  auto it = rows.begin();
  std::size_t row = 0;
  for (std::size_t s = 0; s < t.states; ++s) {
    std::size_t expected_choice = 0;
    while (it != rows.end() && it->first.first == s) {
      if (it->first.second != expected_choice)
        throw ParseError(".tra: state " + std::to_string(s) + " is missing choice " +
                             std::to_string(expected_choice),
                         0, 0);
      for (auto& [dst, v] : it->second) t.entries.push_back({row, dst, v});
      ++row;
      ++expected_choice;
      ++it;
    }
    if (expected_choice == 0) {
      if (t.kind != ModelKind::Ctmc)
        throw ParseError(".tra: state " + std::to_string(s) + " has no outgoing transitions", 0, 0);
      ++row;  // absorbing CTMC state: empty rate row
    }
    t.choices.state_offsets.push_back(row);
  }

  t.labeling = Labeling(t.states);
  const auto lab_lines = lines_of(lab);
  enum { Before, Declaring, Body } phase = Before;
  for (const auto& line : lab_lines) {
    if (line.text == "#DECLARATION") {
      if (phase != Before) malformed(".lab", line, "duplicate #DECLARATION");
      phase = Declaring;
      continue;
    }
    if (line.text == "#END") {
      if (phase != Declaring) malformed(".lab", line, "#END without #DECLARATION");
      phase = Body;
      continue;
    }
    const std::string content = strip_comment(line.text);
    if (content.empty()) continue;
    auto f = fields(".lab", line, content);
    if (phase == Before) malformed(".lab", line, "expected #DECLARATION");
    if (phase == Declaring) {
      for (auto& name : f) {
        for (const auto& d : t.declared_labels)
          if (d == name) malformed(".lab", line, "label '" + name + "' declared twice");
        t.declared_labels.push_back(name);
        t.labeling.add(name, StateSet(t.states));
      }
      continue;
    }
    const std::size_t s = parse_index(".lab", line, f[0]);
    if (s >= t.states) malformed(".lab", line, "state " + std::to_string(s) + " does not exist");
    if (f.size() < 2) malformed(".lab", line, "expected 'state label [label ...]'");
    for (std::size_t k = 1; k < f.size(); ++k) {
      if (!t.labeling.has(f[k])) malformed(".lab", line, "undeclared label '" + f[k] + "'");
      t.labeling.add_state(f[k], s);
    }
  }
  if (phase != Body) throw ParseError(".lab: missing #DECLARATION ... #END header", 1, 1, {"#DECLARATION"});

  if (rew) {
    t.state_rewards.emplace(t.states, Rational(0));
    for (const auto& line : lines_of(*rew)) {
      const std::string content = strip_comment(line.text);
      if (content.empty()) continue;
      auto f = fields(".rew", line, content);
      if (f.size() != 2) malformed(".rew", line, "expected 'state value'");
      const std::size_t s = parse_index(".rew", line, f[0]);
      if (s >= t.states) malformed(".rew", line, "state " + std::to_string(s) + " does not exist");
      Rational v = parse_value(".rew", line, f[1]);
      if (v < 0) malformed(".rew", line, "negative reward");
      (*t.state_rewards)[s] = v;
    }
  }
  return t;
}

Model<Rational> explicit_model(const ExplicitTables& t) {
  Model<Rational> m;
  m.kind = t.kind;
  m.choices = t.choices;
  m.transitions = from_triplets(t.choices.rows(), t.states, t.entries);
  m.labeling = t.labeling;
  if (t.kind == ModelKind::Ctmc) {
    m.exit_rates.resize(t.states);
    for (std::size_t s = 0; s < t.states; ++s) m.exit_rates[s] = m.transitions.row(s).sum();
  }
  if (t.labeling.has("init")) {
    m.initial_states = t.labeling.get("init");
  } else {
    m.initial_states = StateSet(t.states);
    m.initial_states.set(0);
  }
  if (t.state_rewards) m.rewards[""].state_rewards = t.state_rewards;
  if (auto v = validate(m)) throw BuildError(v->message);
  return m;
}

Model<Rational> read_explicit_files(const std::string& tra_path, const std::string& lab_path,
                                    const std::optional<std::string>& rew_path) {
  const std::string tra = read_file(tra_path), lab = read_file(lab_path);
  std::optional<std::string> rew;
  if (rew_path) rew = read_file(*rew_path);
  return explicit_model(parse_explicit(tra, lab, rew ? std::optional<std::string_view>(*rew) : std::nullopt));
}

std::string write_tra(const Model<Rational>& m) {
  if (m.kind == ModelKind::Ma) throw UnsupportedError("explicit format has no Markov automata");
  std::ostringstream out;
  out << to_string(m.kind) << "\n";
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    for (std::size_t r = m.choices.first_row(s); r < m.choices.end_row(s); ++r) {
      auto row = m.transitions.row(r);
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << s << ' ';
        if (m.kind == ModelKind::Mdp) out << (r - m.choices.first_row(s)) << ' ';
        out << row.column(i) << ' ' << to_string(row.value(i)) << "\n";
      }
    }
  }
  return out.str();
}

std::string write_lab(const Model<Rational>& m) {
  std::ostringstream out;
  auto names = m.labeling.names();
  const bool has_init = m.labeling.has("init");
  out << "#DECLARATION\n";
  if (!has_init) out << "init";
  for (std::size_t i = 0; i < names.size(); ++i) out << (i || !has_init ? " " : "") << names[i];
  out << "\n#END\n";
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    std::string line;
    if (!has_init && m.initial_states[s]) line += " init";
    for (const auto& name : names)
      if (m.labeling.get(name)[s]) line += " " + name;
    if (!line.empty()) out << s << line << "\n";
  }
  return out.str();
}

}  // namespace stormlet
