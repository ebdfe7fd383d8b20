#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stormlet/builder.hpp"
#include "stormlet/checker.hpp"
#include "stormlet/explicit_format.hpp"
#include "stormlet/prism.hpp"

namespace stormlet::test {

inline std::string model_path(const std::string& name) { return std::string(STORMLET_MODELS_DIR) + "/" + name; }

/// a/b in canonical form; gmpxx does not reduce on construction.
inline Rational frac(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

/// A bundled model with its property file.
struct Benchmark {
  std::string name;        // file stem
  std::string file;        // PRISM file, empty for explicit models
  std::string constants;   // bindings for non-parametric runs
  bool parametric = false; // has undefined constants used as parameters
};

inline const std::vector<Benchmark>& benchmarks() {
  static const std::vector<Benchmark> all = {
      {"die", "die.pm", "", false},
      {"herman3", "herman3.pm", "", false},
      {"brp", "brp.pm", "", false},
      {"ctmc_single", "ctmc_single.pm", "", false},
      {"erlang2", "erlang2.pm", "", false},
      {"queue", "queue.pm", "", false},
      {"two_action", "two_action.nm", "", false},
      {"detour", "detour.nm", "", false},
      {"grid", "grid.nm", "", false},
      {"small", "small.ma", "", false},
      {"pcoins", "pcoins.pm", "p=0.3,q=0.6", true},
      {"pdie", "pdie.pm", "p=0.5", true},
      {"three", "", "", false},
      {"choice", "", "", false},
  };
  return all;
}

inline Model<Rational> load_explicit(const std::string& stem) {
  const std::string rew = model_path(stem + ".rew");
  std::optional<std::string> rew_path;
  if (std::filesystem::exists(rew)) rew_path = rew;
  return read_explicit_files(model_path(stem + ".tra"), model_path(stem + ".lab"), rew_path);
}

inline BuildOptions build_options(const std::string& constants) {
  BuildOptions o;
  if (!constants.empty()) o.constants = parse_constant_bindings(constants);
  return o;
}

template <typename N>
Model<N> load(const Benchmark& b) {
  if (b.file.empty()) {
    if constexpr (std::is_same_v<N, double>) return to_float_model(load_explicit(b.name));
    else return load_explicit(b.name);
  }
  return build_model<N>(parse_program_file(model_path(b.file)), build_options(b.constants));
}

/// Properties of a benchmark with constants and formulas resolved.
inline std::vector<Property> properties(const Benchmark& b) {
  auto props = parse_properties(read_text(model_path(b.name + ".props")));
  if (b.file.empty()) return props;
  const auto cp = compile_program(parse_program_file(model_path(b.file)), build_options(b.constants));
  for (auto& p : props) {
    if (p.path.left) p.path.left = resolve_expression(cp, p.path.left);
    p.path.right = resolve_expression(cp, p.path.right);
  }
  return props;
}

template <typename N>
CheckResult<N> run(const Model<N>& m, const Property& p, SolverMethod method) {
  CheckSettings s;
  s.solver.method = method;
  return check(m, p, s);
}

/// Time-bounded CTMC properties, which only the floating-point engine handles.
inline bool is_time_bounded(ModelKind kind, const Property& p) { return kind == ModelKind::Ctmc && p.path.bound; }

inline double as_double(const Extended<Rational>& v) {
  return v.infinite ? INFINITY : v.value.get_d();
}
inline double as_double(const Extended<double>& v) { return v.infinite ? INFINITY : v.value; }

/// |a - b| / |b|, or |a - b| when b is zero; equal infinities give 0.
inline double relative_error(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b ? 0.0 : INFINITY;
  return b == 0 ? std::fabs(a) : std::fabs(a - b) / std::fabs(b);
}

/// Optimum at the first initial state over all memoryless deterministic
/// schedulers, each evaluated exactly on the induced model.
inline Extended<Rational> best_memoryless(const Model<Rational>& m, const Property& p) {
  const std::size_t n = m.state_count();
  std::vector<std::size_t> choice(n, 0);
  std::optional<Extended<Rational>> best;
  auto less = [](const Extended<Rational>& a, const Extended<Rational>& b) {
    if (a.infinite || b.infinite) return !a.infinite && b.infinite;
    return a.value < b.value;
  };
  for (;;) {
    const auto v = run(apply_scheduler(m, choice), p, SolverMethod::Gaussian).value_at_initial();
    if (!best || (p.direction == Direction::Max ? less(*best, v) : less(v, *best))) best = v;
    std::size_t s = 0;
    while (s < n && ++choice[s] == m.choices.choice_count(s)) choice[s++] = 0;
    if (s == n) return *best;
  }
}

}  // namespace stormlet::test
