#include "stormlet/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stormlet/bisimulation.hpp"
#include "stormlet/builder.hpp"
#include "stormlet/checker.hpp"
#include "stormlet/explicit_format.hpp"
#include "stormlet/parametric.hpp"
#include "stormlet/prism.hpp"

namespace stormlet {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string prism;
  std::vector<std::string> explicit_files;
  std::string staterew;
  std::vector<std::string> props;
  std::string constants;
  std::string eqsolver;
  std::string precision;
  std::string point;
  std::string region;
  std::string engine = "sparse";
  double timeout = 0;
  bool sound = false;
  bool exact = false;
  bool absolute = false;
  bool bisim = false;
  bool parametric = false;
  bool fix_deadlocks = false;
  bool json = false;
};

struct Invocation {
  Options options;
  CheckSettings settings;
  std::optional<ParameterPoint> point;
  std::optional<Region> region;
};

/// Output of one property: report lines and the JSON entry.
struct Report {
  std::vector<std::string> lines;
  Json entry = Json::object();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

SolverMethod method_named(const std::string& name) {
  if (name == "vi") return SolverMethod::ValueIteration;
  if (name == "ii") return SolverMethod::IntervalIteration;
  if (name == "ovi") return SolverMethod::OptimisticValueIteration;
  if (name == "exact") return SolverMethod::Gaussian;
  if (name == "elimination") return SolverMethod::Elimination;
  return SolverMethod::PolicyIteration;
}

CheckSettings check_settings(const Options& o, std::ostream& err) {
  CheckSettings s;
  std::string name = o.eqsolver;
  if (o.sound) {
    if (!name.empty() && name != "ii" && name != "ovi")
      throw Error("--sound needs a sound solver, not '" + name + "'");
    if (name.empty()) name = "ii";
  }
  if (name.empty()) name = o.parametric ? "elimination" : o.exact ? "exact" : "vi";
  if (o.exact && (name == "vi" || name == "ii" || name == "ovi"))
    throw UnsupportedError("--exact needs an exact solver (exact, elimination or pi), not '" + name + "'");
  s.solver.method = method_named(name);
  if (!o.precision.empty()) {
    if (!is_number_literal(o.precision)) throw Error("malformed precision '" + o.precision + "'");
    s.solver.precision = parse_rational(o.precision);
    if (s.solver.precision <= 0) throw Error("the precision must be positive");
  }
  s.solver.relative = !o.absolute;
  if (const char* cap = std::getenv("STORMLET_MAX_ITER")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(cap, &end, 10);
    if (*cap == '\0' || *end != '\0' || v == 0) throw Error("STORMLET_MAX_ITER must be a positive integer");
    s.solver.max_iterations = static_cast<std::size_t>(v);
  }
  s.on_warning = [&err](const std::string& message) { err << "warning: " << message << '\n'; };
  return s;
}

/// Each --prop names a property file or holds property text.
std::vector<Property> load_properties(const std::vector<std::string>& sources) {
  std::vector<Property> out;
  for (const auto& source : sources) {
    std::error_code ec;
    const bool is_file = std::filesystem::is_regular_file(source, ec);
    for (auto& p : parse_properties(is_file ? read_file(source) : source)) out.push_back(std::move(p));
  }
  if (out.empty()) throw Error("no property given");
  return out;
}

Property resolve(const CompiledProgram& cp, Property p) {
  if (p.path.left) p.path.left = resolve_expression(cp, p.path.left);
  if (p.path.right) p.path.right = resolve_expression(cp, p.path.right);
  return p;
}

Json json_value(const Extended<double>& v) { return v.infinite ? Json("inf") : Json(v.value); }
Json json_value(const Extended<Rational>& v) { return to_string(v); }
Json json_value(const Extended<RationalFunction>& v) { return to_string(v); }

template <typename N>
bool less(const Extended<N>& a, const Extended<N>& b) {
  if (a.infinite || b.infinite) return !a.infinite && b.infinite;
  return a.value < b.value;
}

/// One value when all initial states agree, else the range they span.
template <typename N>
std::string initial_text(const CheckResult<N>& r) {
  const auto init = r.initial_states.indices();
  const Extended<N>& first = r.values[init.front()];
  const bool uniform = std::all_of(init.begin(), init.end(), [&](std::size_t s) { return r.values[s] == first; });
  if (uniform) return to_string(first);
  if constexpr (number_traits<N>::ordered) {
    Extended<N> lo = first, hi = first;
    for (std::size_t s : init) {
      if (less(r.values[s], lo)) lo = r.values[s];
      if (less(hi, r.values[s])) hi = r.values[s];
    }
    return "[" + to_string(lo) + ", " + to_string(hi) + "]";
  } else {
    throw UnsupportedError("the solution functions of the initial states differ");
  }
}

template <typename N>
void record(const Property& p, const CheckResult<N>& r, Report& report) {
  const std::string text = p.threshold ? (r.holds_initially() ? "true" : "false") : initial_text(r);
  report.lines.push_back("Result (for initial states): " + text);
  report.entry["result"] = text;
  if (p.threshold) report.entry["holds"] = r.holds_initially();
  Json values = Json::array();
  for (std::size_t s : r.initial_states.indices()) values.push_back({{"state", s}, {"value", json_value(r.values[s])}});
  report.entry["initial_states"] = std::move(values);
  const std::size_t first = r.initial_states.first();
  if (r.lower) report.entry["lower"] = json_value(Extended<N>::finite((*r.lower)[first]));
  if (r.upper) report.entry["upper"] = json_value(Extended<N>::finite((*r.upper)[first]));
  report.entry["iterations"] = r.iterations;
}

template <typename N>
Json model_summary(const Model<N>& m) {
  Json j;
  j["type"] = to_string(m.kind);
  j["states"] = m.state_count();
  j["choices"] = m.row_count();
  j["transitions"] = m.transition_count();
  j["initial_states"] = m.initial_states.indices();
  return j;
}

template <typename N>
std::string summary_line(const Model<N>& m) {
  std::string line = "Model: " + upper(to_string(m.kind)) + " with " + std::to_string(m.state_count()) + " states";
  if (is_nondeterministic(m.kind)) line += ", " + std::to_string(m.row_count()) + " choices";
  return line + " and " + std::to_string(m.transition_count()) + " transitions";
}

template <typename N>
Report check_concrete(const Model<N>& m, const Property& p, const CheckSettings& settings, bool bisim) {
  Report report;
  if (bisim) {
    const auto mini = minimize_for(m, p);
    report.lines.push_back("Bisimulation quotient: " + std::to_string(mini.model.state_count()) + " states and " +
                           std::to_string(mini.model.transition_count()) + " transitions");
    report.entry["quotient"] = {{"states", mini.model.state_count()}, {"transitions", mini.model.transition_count()}};
    record(p, check(mini.model, mini.property, settings), report);
  } else {
    record(p, check(m, p, settings), report);
  }
  return report;
}

Report check_parametric(const Model<RationalFunction>& m, const Property& p, const Invocation& inv,
                        const CheckSettings& settings) {
  Report report;
  if (inv.point) {
    record(p, check(instantiate(m, *inv.point), p, settings), report);
  } else if (inv.region) {
    const Interval iv = region_lifting(m, p, *inv.region);
    std::string text = "[" + to_string(iv.lower) + ", " + to_string(iv.upper) + "]";
    if (p.threshold) {
      // The lifted interval contains every value over the region.
      const bool lo = satisfies(*p.threshold, iv.lower), hi = satisfies(*p.threshold, iv.upper);
      text = lo && hi ? "true" : !lo && !hi ? "false" : "unknown " + text;
    }
    report.lines.push_back("Result (for initial states): " + text);
    report.entry["result"] = text;
    report.entry["lower"] = to_string(iv.lower);
    report.entry["upper"] = to_string(iv.upper);
  } else {
    if (p.threshold) throw UnsupportedError("thresholds need --point or --region in parametric mode");
    record(p, check(m, p, settings), report);
  }
  return report;
}

int exit_code_of(const std::exception& e) {
  if (dynamic_cast<const UnsupportedError*>(&e)) return kExitUnsupported;
  if (dynamic_cast<const TimeoutError*>(&e)) return kExitTimeout;
  return kExitInputError;
}

std::string error_kind(int code) {
  switch (code) {
    case kExitUnsupported: return "unsupported";
    case kExitTimeout: return "timeout";
    default: return "error";
  }
}

/// Builds the model once and checks every property in order. Errors in one
/// property are reported and the remaining properties still run; the exit
/// code is that of the first failure.
template <typename N>
int run_all(const Model<N>& m, const std::vector<Property>& properties, const Invocation& inv, Json model_json,
            std::ostream& out, std::ostream& err) {
  const bool json = inv.options.json;
  if (!json) out << summary_line(m) << '\n';
  Json results = Json::array();
  int code = kExitOk;
  for (const auto& p : properties) {
    const std::string title = p.name.empty() ? to_string(p) : p.name;
    if (!json) out << "\nModel checking property \"" << title << "\" ...\n" << std::flush;
    Deadline deadline;
    if (inv.options.timeout > 0)
      deadline = Deadline::after(std::chrono::milliseconds(static_cast<long long>(inv.options.timeout * 1000)));
    CheckSettings settings = inv.settings;
    settings.solver.deadline = &deadline;
    Json entry;
    entry["property"] = to_string(p);
    entry["name"] = p.name.empty() ? Json(nullptr) : Json(p.name);
    try {
      Report report;
      if constexpr (std::is_same_v<N, RationalFunction>) {
        report = check_parametric(m, p, inv, settings);
      } else {
        report = check_concrete(m, p, settings, inv.options.bisim);
      }
      if (!json)
        for (const auto& line : report.lines) out << line << '\n';
      entry.update(report.entry);
    } catch (const Error& e) {
      const int c = exit_code_of(e);
      if (code == kExitOk) code = c;
      err << "error: " << e.what() << '\n';
      entry["error"] = {{"kind", error_kind(c)}, {"message", e.what()}};
    }
    results.push_back(std::move(entry));
  }
  if (json) {
    Json doc;
    doc["model"] = std::move(model_json);
    doc["results"] = std::move(results);
    out << doc.dump(2) << '\n';
  }
  return code;
}

template <typename N>
int run_prism(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Options& o = inv.options;
  const Program program = parse_program_file(o.prism);
  BuildOptions build;
  build.fix_deadlocks = o.fix_deadlocks;
  if (!o.constants.empty()) build.constants = parse_constant_bindings(o.constants);
  if constexpr (std::is_same_v<N, RationalFunction>) build.parameters = undefined_constants(program, build.constants);
  build.on_warning = inv.settings.on_warning;
  const CompiledProgram cp = compile_program(program, build);
  std::vector<Property> properties;
  for (auto& p : load_properties(o.props)) properties.push_back(resolve(cp, std::move(p)));
  const Model<N> m = build_model<N>(program, build);
  Json model_json = model_summary(m);
  if constexpr (std::is_same_v<N, RationalFunction>) {
    const auto names = model_parameters(m);
    model_json["parameters"] = names;
    if (!o.json) {
      std::string line = "Parameters:";
      for (const auto& n : names) line += " " + n;
      out << line << '\n';
    }
  }
  return run_all(m, properties, inv, std::move(model_json), out, err);
}

int run_explicit(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Options& o = inv.options;
  std::optional<std::string> rew;
  if (!o.staterew.empty()) rew = o.staterew;
  const Model<Rational> exact = read_explicit_files(o.explicit_files[0], o.explicit_files[1], rew);
  const auto properties = load_properties(o.props);
  if (o.exact) return run_all(exact, properties, inv, model_summary(exact), out, err);
  const Model<double> m = to_float_model(exact);
  return run_all(m, properties, inv, model_summary(m), out, err);
}

void validate(const Options& o) {
  if (o.prism.empty() && o.explicit_files.empty()) throw Error("no model given; use --prism or --explicit");
  if (o.props.empty()) throw Error("no property given; use --prop");
  if (o.engine != "sparse") throw UnsupportedError("engine '" + o.engine + "' is not available; only 'sparse' is");
  if (!o.explicit_files.empty() && !o.constants.empty()) throw Error("--constants needs a PRISM model");
  if (o.parametric && !o.explicit_files.empty()) throw UnsupportedError("parametric explicit models");
  if (o.parametric && o.bisim) throw UnsupportedError("bisimulation on parametric models");
  if (o.exact && o.parametric) throw Error("--exact and --parametric exclude each other");
  if (!o.parametric && (!o.point.empty() || !o.region.empty())) throw Error("--point and --region need --parametric");
  if (!o.point.empty() && !o.region.empty()) throw Error("--point and --region exclude each other");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Probabilistic model checker for DTMCs, CTMCs, MDPs and Markov automata", "stormlet"};
  auto* prism = app.add_option("--prism", o.prism, "PRISM model file")->check(CLI::ExistingFile);
  auto* expl = app.add_option("--explicit", o.explicit_files, "Explicit model: transition file and label file")
                   ->expected(2)
                   ->check(CLI::ExistingFile)
                   ->excludes(prism);
  app.add_option("--staterew", o.staterew, "State reward file for --explicit")->check(CLI::ExistingFile)->needs(expl);
  app.add_option("--prop", o.props, "Property text or property file (repeatable)");
  app.add_option("--constants", o.constants, "Constant values, e.g. N=3,p=0.1");
  app.add_option("--eqsolver", o.eqsolver, "Solver: vi, ii, ovi, exact, elimination or pi")
      ->check(CLI::IsMember({"vi", "ii", "ovi", "exact", "elimination", "pi"}));
  app.add_flag("--sound", o.sound, "Use a sound solver (interval iteration unless --eqsolver ovi)");
  app.add_flag("--exact", o.exact, "Exact rational arithmetic");
  app.add_option("--precision", o.precision, "Convergence precision (default 1e-6)");
  app.add_flag("--absolute", o.absolute, "Absolute instead of relative convergence criterion");
  app.add_flag("--bisim", o.bisim, "Check on the strong bisimulation quotient");
  app.add_flag("--parametric", o.parametric, "Undefined constants become parameters");
  app.add_option("--point", o.point, "Parameter point, e.g. p=1/2,q=1/3");
  app.add_option("--region", o.region, "Parameter region, e.g. 0.3<=p<=0.6");
  app.add_option("--timeout", o.timeout, "Time limit per property in seconds")->check(CLI::PositiveNumber);
  app.add_flag("--fix-deadlocks", o.fix_deadlocks, "Add self-loops to deadlock states");
  app.add_option("--engine", o.engine, "Engine (only sparse)");
  app.add_flag("--json", o.json, "Print a JSON results object");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    validate(o);
    Invocation inv;
    inv.options = o;
    inv.settings = check_settings(o, err);
    if (!o.point.empty()) inv.point = parse_point(o.point);
    if (!o.region.empty()) inv.region = parse_region(o.region);
    if (!o.explicit_files.empty()) return run_explicit(inv, out, err);
    if (o.parametric) return run_prism<RationalFunction>(inv, out, err);
    if (o.exact) return run_prism<Rational>(inv, out, err);
    return run_prism<double>(inv, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_of(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace stormlet
