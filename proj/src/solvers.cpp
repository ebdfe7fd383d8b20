#include "stormlet/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace stormlet {

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::ValueIteration: return "vi";
    case SolverMethod::IntervalIteration: return "ii";
    case SolverMethod::OptimisticValueIteration: return "ovi";
    case SolverMethod::Gaussian: return "exact";
    case SolverMethod::Elimination: return "elimination";
    case SolverMethod::PolicyIteration: return "pi";
    case SolverMethod::RationalSearch: return "rational-search";
  }
  return "?";
}

namespace {

template <typename N>
using T = number_traits<N>;

template <typename N>
N row_value(const EquationSystem<N>& sys, std::size_t r, const std::vector<N>& x) {
  N v = sys.b[r];
  auto row = sys.matrix.row(r);
  for (std::size_t i = 0; i < row.size(); ++i) v = v + row.value(i) * x[row.column(i)];
  return v;
}

template <typename N>
bool better(Direction d, const N& a, const N& b) {
  return d == Direction::Min ? a < b : b < a;
}

void tick(const SolverSettings& s) {
  if (s.deadline) s.deadline->check();
}

[[noreturn]] void no_convergence(const char* what, std::size_t cap) {
  throw SolverError(std::string(what) + " did not converge within " + std::to_string(cap) + " iterations");
}

template <typename N>
N abs_value(const N& x) {
  return x < T<N>::zero() ? N(-x) : x;
}

/// Largest componentwise difference, relative to the new value if asked
/// (0/0 counts as 0, anything else over 0 as unbounded).
template <typename N>
bool converged(const std::vector<N>& old_x, const std::vector<N>& new_x, const N& eps, bool relative) {
  for (std::size_t i = 0; i < new_x.size(); ++i) {
    const N d = abs_value(N(new_x[i] - old_x[i]));
    if (T<N>::is_zero(d)) continue;
    if (relative) {
      const N m = abs_value(new_x[i]);
      if (T<N>::is_zero(m) || eps * m < d) return false;
    } else if (eps < d) {
      return false;
    }
  }
  return true;
}

template <typename N>
N deficit(const EquationSystem<N>& sys, std::size_t r) {
  return T<N>::one() - sys.matrix.row(r).sum();
}

template <typename N>
bool exits(const EquationSystem<N>& sys, std::size_t r) {
  if constexpr (std::is_same_v<N, double>) {
    return deficit(sys, r) > 1e-9;
  } else {
    return T<N>::zero() < deficit(sys, r);
  }
}

/// Attractor layers towards the exit. Universal: a state joins once every
/// row exits or reaches a lower layer; existential: once some row does.
/// Returns per state (layer, chosen row) with layer npos for unreached states.
template <typename N>
std::vector<std::pair<std::size_t, std::size_t>> exit_layers(const EquationSystem<N>& sys, bool universal) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const std::size_t n = sys.size();
  std::vector<std::pair<std::size_t, std::size_t>> out(n, {npos, npos});
  std::vector<std::size_t> owner(sys.matrix.rows());
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = sys.row_groups[s]; r < sys.row_groups[s + 1]; ++r) owner[r] = s;

  for (std::size_t layer = 0;; ++layer) {
    std::vector<std::pair<std::size_t, std::size_t>> joined;
    for (std::size_t s = 0; s < n; ++s) {
      if (out[s].first != npos) continue;
      std::size_t chosen = npos;
      bool all = sys.row_groups[s] < sys.row_groups[s + 1];
      for (std::size_t r = sys.row_groups[s]; r < sys.row_groups[s + 1]; ++r) {
        bool ok = exits(sys, r);
        auto row = sys.matrix.row(r);
        for (std::size_t i = 0; i < row.size() && !ok; ++i) ok = out[row.column(i)].first < layer;
        if (ok && chosen == npos) chosen = r;
        all = all && ok;
      }
      if (chosen != npos && (!universal || all)) joined.emplace_back(s, chosen);
    }
    if (joined.empty()) break;
    for (auto [s, r] : joined) out[s] = {layer, r};
  }
  return out;
}

template <typename N>
EquationSystem<N> policy_system(const EquationSystem<N>& sys, const std::vector<std::size_t>& rows) {
  std::vector<Triplet<N>> entries;
  std::vector<N> b;
  for (std::size_t s = 0; s < sys.size(); ++s) {
    auto row = sys.matrix.row(rows[s]);
    for (std::size_t i = 0; i < row.size(); ++i) entries.push_back({s, row.column(i), row.value(i)});
    b.push_back(sys.b[rows[s]]);
  }
  return linear_system(from_triplets(sys.size(), sys.size(), std::move(entries)), std::move(b));
}

}  // namespace

template <typename N>
EquationSystem<N> linear_system(SparseMatrix<N> a, std::vector<N> b) {
  EquationSystem<N> sys;
  sys.row_groups.resize(a.rows() + 1);
  for (std::size_t i = 0; i <= a.rows(); ++i) sys.row_groups[i] = i;
  sys.matrix = std::move(a);
  sys.b = std::move(b);
  return sys;
}

template <typename N>
std::vector<N> bellman_step(const EquationSystem<N>& sys, const std::vector<N>& x, std::vector<std::size_t>* choice) {
  const std::size_t n = sys.size();
  std::vector<N> y(n, T<N>::zero());
  if (choice) choice->assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t first = sys.row_groups[s], end = sys.row_groups[s + 1];
    if (first == end) continue;
    N best = row_value(sys, first, x);
    std::size_t arg = 0;
    for (std::size_t r = first + 1; r < end; ++r) {
      N v = row_value(sys, r, x);
      if (better(sys.direction, v, best)) {
        best = std::move(v);
        arg = r - first;
      }
    }
    y[s] = std::move(best);
    if (choice) (*choice)[s] = arg;
  }
  return y;
}

template <typename N>
SolverOutcome<N> value_iteration(const EquationSystem<N>& sys, const SolverSettings& settings) {
  const N eps = T<N>::from_rational(settings.precision);
  SolverOutcome<N> out;
  std::vector<N> x(sys.size(), T<N>::zero());
  std::vector<std::size_t> choice;
  for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
    tick(settings);
    std::vector<N> y;
    if (settings.gauss_seidel) {
      y = x;
      choice.assign(sys.size(), 0);
      for (std::size_t s = 0; s < sys.size(); ++s) {
        const std::size_t first = sys.row_groups[s], end = sys.row_groups[s + 1];
        if (first == end) continue;
        N best = row_value(sys, first, y);
        for (std::size_t r = first + 1; r < end; ++r) {
          N v = row_value(sys, r, y);
          if (better(sys.direction, v, best)) {
            best = std::move(v);
            choice[s] = r - first;
          }
        }
        y[s] = std::move(best);
      }
    } else {
      y = bellman_step(sys, x, &choice);
    }
    const bool done = converged(x, y, eps, settings.relative);
    x = std::move(y);
    if (done) {
      out.values = std::move(x);
      out.iterations = it;
      out.policy = std::move(choice);
      return out;
    }
  }
  no_convergence("value iteration", settings.max_iterations);
}

template <typename N>
SolverOutcome<N> interval_iteration(const EquationSystem<N>& sys, const SolverSettings& settings) {
  const std::size_t n = sys.size();
  const N eps = T<N>::from_rational(settings.precision);
  const N two_eps = eps + eps;
  std::vector<N> l = sys.lower ? *sys.lower : std::vector<N>(n, T<N>::zero());
  std::vector<N> u = sys.upper ? *sys.upper : std::vector<N>(n, T<N>::one());
  for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
    tick(settings);
    std::vector<N> nl = bellman_step(sys, l), nu = bellman_step(sys, u);
    bool done = true;
    for (std::size_t s = 0; s < n; ++s) {
      if (l[s] < nl[s]) l[s] = nl[s];
      if (nu[s] < u[s]) u[s] = nu[s];
      const N gap = u[s] - l[s];
      // A zero lower bound has no relative scale; the gap is then absolute.
      const bool relative = settings.relative && T<N>::zero() < l[s];
      if (relative ? two_eps * l[s] < gap : two_eps < gap) done = false;
    }
    if (done) {
      SolverOutcome<N> out;
      out.values.resize(n);
      for (std::size_t s = 0; s < n; ++s) out.values[s] = (l[s] + u[s]) / N(2);
      out.lower = std::move(l);
      out.upper = std::move(u);
      out.iterations = it;
      return out;
    }
  }
  no_convergence("interval iteration", settings.max_iterations);
}

template <typename N>
SolverOutcome<N> optimistic_value_iteration(const EquationSystem<N>& sys, const SolverSettings& settings) {
  const std::size_t n = sys.size();
  const N eps = T<N>::from_rational(settings.precision);
  N criterion = eps;
  std::vector<N> x = sys.lower ? *sys.lower : std::vector<N>(n, T<N>::zero());
  std::size_t it = 0;
  while (it < settings.max_iterations) {
    // Value iteration up to the current heuristic criterion.
    for (;;) {
      if (++it > settings.max_iterations) no_convergence("optimistic value iteration", settings.max_iterations);
      tick(settings);
      std::vector<N> y = bellman_step(sys, x);
      for (std::size_t s = 0; s < n; ++s)
        if (y[s] < x[s]) y[s] = x[s];
      const bool done = converged(x, y, criterion, settings.relative);
      x = std::move(y);
      if (done) break;
    }
    // Guess an upper bound and verify it with one operator application.
    std::vector<N> u(n);
    for (std::size_t s = 0; s < n; ++s) u[s] = settings.relative ? N(x[s] + x[s] * eps) : N(x[s] + eps);
    if (sys.upper)
      for (std::size_t s = 0; s < n; ++s)
        if ((*sys.upper)[s] < u[s]) u[s] = (*sys.upper)[s];
    const std::vector<N> fu = bellman_step(sys, u);
    bool verified = true;
    for (std::size_t s = 0; s < n && verified; ++s) {
      if constexpr (std::is_same_v<N, double>) {
        // Tolerate rounding in the operator itself, a few ulps of u.
        verified = fu[s] <= u[s] + 1e-14 * std::fabs(u[s]);
      } else {
        verified = !(u[s] < fu[s]);
      }
    }
    if (verified) {
      SolverOutcome<N> out;
      out.values.resize(n);
      for (std::size_t s = 0; s < n; ++s) out.values[s] = (x[s] + u[s]) / N(2);
      out.lower = std::move(x);
      out.upper = std::move(u);
      out.iterations = it;
      return out;
    }
    criterion = criterion / N(2);
  }
  no_convergence("optimistic value iteration", settings.max_iterations);
}

template <typename N>
SolverOutcome<N> gaussian_elimination(const EquationSystem<N>& sys) {
  if (!sys.deterministic()) throw SolverError("Gaussian elimination needs one row per unknown");
  const std::size_t n = sys.size();
  // M = I - A, kept as sparse ordered rows plus a column -> rows index.
  std::vector<std::map<std::size_t, N>> m(n);
  std::vector<std::set<std::size_t>> col_rows(n);
  std::vector<N> rhs = sys.b;
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = T<N>::one();
    col_rows[i].insert(i);
    auto row = sys.matrix.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::size_t j = row.column(k);
      auto [it, inserted] = m[i].try_emplace(j, T<N>::zero());
      it->second = it->second - row.value(k);
      if (T<N>::is_zero(it->second)) {
        m[i].erase(it);
        col_rows[j].erase(i);
      } else {
        col_rows[j].insert(i);
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto pivot_it = m[k].find(k);
    if (pivot_it == m[k].end()) throw SolverError("singular system in Gaussian elimination");
    const N pivot = pivot_it->second;
    std::vector<std::size_t> below;
    for (std::size_t i : col_rows[k])
      if (i > k) below.push_back(i);
    for (std::size_t i : below) {
      const N f = m[i].at(k) / pivot;
      for (const auto& [j, v] : m[k]) {
        if (j < k) continue;
        auto [it, inserted] = m[i].try_emplace(j, T<N>::zero());
        it->second = it->second - f * v;
        if (T<N>::is_zero(it->second) || j == k) {
          m[i].erase(it);
          col_rows[j].erase(i);
        } else {
          col_rows[j].insert(i);
        }
      }
      rhs[i] = rhs[i] - f * rhs[k];
    }
  }
  SolverOutcome<N> out;
  out.values.assign(n, T<N>::zero());
  for (std::size_t k = n; k-- > 0;) {
    N v = rhs[k];
    for (const auto& [j, a] : m[k])
      if (j > k) v = v - a * out.values[j];
    out.values[k] = v / m[k].at(k);
  }
  return out;
}

template <typename N>
SolverOutcome<N> state_elimination(const EquationSystem<N>& sys, const std::vector<std::size_t>* wanted) {
  if (!sys.deterministic()) throw SolverError("state elimination needs one row per unknown");
  const std::size_t n = sys.size();
  std::vector<std::map<std::size_t, N>> a(n);
  std::vector<std::set<std::size_t>> pred(n);
  std::vector<N> b = sys.b;
  for (std::size_t s = 0; s < n; ++s) {
    auto row = sys.matrix.row(s);
    for (std::size_t k = 0; k < row.size(); ++k) {
      a[s].emplace(row.column(k), row.value(k));
      pred[row.column(k)].insert(s);
    }
  }
  std::vector<bool> remaining(n, true);
  std::vector<std::size_t> order;
  order.reserve(n);
  auto degree = [&](std::size_t s) {
    const std::size_t in = pred[s].size() - pred[s].count(s);
    const std::size_t out = a[s].size() - a[s].count(s);
    return in * out;
  };
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t s = n;
    std::size_t best = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!remaining[c]) continue;
      const std::size_t d = degree(c);
      if (s == n || d < best) {
        s = c;
        best = d;
      }
    }
    // Remove the self-loop by rescaling the row with 1 / (1 - p).
    if (auto loop = a[s].find(s); loop != a[s].end()) {
      const N p = loop->second;
      a[s].erase(loop);
      pred[s].erase(s);
      const N rest = T<N>::one() - p;
      if (T<N>::is_zero(rest)) throw SolverError("state elimination met a probability-1 self-loop");
      for (auto& [t, v] : a[s]) v = v / rest;
      b[s] = b[s] / rest;
    }
    // Redirect every predecessor through the successors of s.
    for (std::size_t q : pred[s]) {
      auto it = a[q].find(s);
      const N w = it->second;
      a[q].erase(it);
      for (const auto& [t, v] : a[s]) {
        auto [jt, inserted] = a[q].try_emplace(t, T<N>::zero());
        jt->second = jt->second + w * v;
        if (T<N>::is_zero(jt->second)) {
          a[q].erase(jt);
          pred[t].erase(q);
        } else {
          pred[t].insert(q);
        }
      }
      b[q] = b[q] + w * b[s];
    }
    pred[s].clear();
    for (const auto& [t, v] : a[s]) pred[t].erase(s);
    remaining[s] = false;
    order.push_back(s);
  }

  SolverOutcome<N> out;
  out.values.assign(n, T<N>::zero());
  std::vector<bool> needed(n, wanted == nullptr);
  if (wanted) {
    std::vector<std::size_t> stack(wanted->begin(), wanted->end());
    for (std::size_t s : stack) needed[s] = true;
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      stack.pop_back();
      for (const auto& [t, v] : a[s])
        if (!needed[t]) {
          needed[t] = true;
          stack.push_back(t);
        }
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t s = order[k];
    if (!needed[s]) continue;
    N v = b[s];
    for (const auto& [t, w] : a[s]) v = v + w * out.values[t];
    out.values[s] = std::move(v);
  }
  return out;
}

template <typename N>
SolverOutcome<N> policy_iteration(const EquationSystem<N>& sys, const SolverSettings& settings) {
  const std::size_t n = sys.size();
  const auto layers = exit_layers(sys, false);
  std::vector<std::size_t> rows(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (layers[s].first == static_cast<std::size_t>(-1))
      throw SolverError("policy iteration: no policy leaves the system from every state");
    rows[s] = layers[s].second;
  }
  auto evaluate = [&](const std::vector<std::size_t>& policy) {
    EquationSystem<N> lin = policy_system(sys, policy);
    return settings.policy_evaluation == SolverMethod::Elimination ? state_elimination(lin).values
                                                                   : gaussian_elimination(lin).values;
  };
  auto improves = [&](const N& candidate, const N& current) {
    if constexpr (std::is_same_v<N, double>) {
      const double slack = 1e-12 * std::max(1.0, std::fabs(current));
      return sys.direction == Direction::Min ? candidate < current - slack : candidate > current + slack;
    } else {
      return better(sys.direction, candidate, current);
    }
  };
  for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
    tick(settings);
    const std::vector<N> x = evaluate(rows);
    bool changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      N best = row_value(sys, rows[s], x);
      for (std::size_t r = sys.row_groups[s]; r < sys.row_groups[s + 1]; ++r) {
        if (r == rows[s]) continue;
        N v = row_value(sys, r, x);
        if (improves(v, best)) {
          best = std::move(v);
          rows[s] = r;
          changed = true;
        }
      }
    }
    if (!changed) {
      SolverOutcome<N> out;
      out.values = x;
      out.iterations = it;
      out.policy.emplace(n);
      for (std::size_t s = 0; s < n; ++s) (*out.policy)[s] = rows[s] - sys.row_groups[s];
      return out;
    }
  }
  no_convergence("policy iteration", settings.max_iterations);
}

template <typename N>
N reward_upper_bound(const EquationSystem<N>& sys) {
  const std::size_t n = sys.size();
  if (n == 0) return T<N>::zero();
  const auto layers = exit_layers(sys, sys.direction == Direction::Max);
  std::vector<std::size_t> by_layer(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (layers[s].first == static_cast<std::size_t>(-1))
      throw SolverError("cannot bound expected rewards: some state never leaves the system");
    by_layer[s] = s;
  }
  std::sort(by_layer.begin(), by_layer.end(),
            [&](std::size_t x, std::size_t y) { return layers[x].first < layers[y].first; });
  std::vector<N> q(n, T<N>::zero());
  std::size_t max_layer = 0;
  for (std::size_t s : by_layer) {
    const std::size_t layer = layers[s].first;
    max_layer = std::max(max_layer, layer);
    // Probability of leaving within layer+1 steps when taking row r.
    auto row_q = [&](std::size_t r) {
      N best = deficit(sys, r);
      if (!exits(sys, r)) best = T<N>::zero();
      auto row = sys.matrix.row(r);
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::size_t t = row.column(i);
        if (layers[t].first >= layer) continue;
        N v = row.value(i) * q[t];
        if (best < v) best = v;
      }
      return best;
    };
    if (sys.direction == Direction::Max) {
      N worst = row_q(sys.row_groups[s]);
      for (std::size_t r = sys.row_groups[s] + 1; r < sys.row_groups[s + 1]; ++r) {
        N v = row_q(r);
        if (v < worst) worst = v;
      }
      q[s] = worst;
    } else {
      q[s] = row_q(layers[s].second);
    }
  }
  N qmin = q[0], bmax = T<N>::zero();
  for (const auto& v : q)
    if (v < qmin) qmin = v;
  for (const auto& v : sys.b)
    if (bmax < v) bmax = v;
  if (!(T<N>::zero() < qmin)) throw SolverError("cannot bound expected rewards: exit probability underflows");
  return bmax * N(static_cast<int>(max_layer + 1)) / qmin;
}

template <typename N>
SolverOutcome<N> solve(const EquationSystem<N>& sys, const SolverSettings& settings) {
  if (sys.size() == 0) return SolverOutcome<N>{};
  if constexpr (!T<N>::ordered) {
    if (settings.method != SolverMethod::Elimination && settings.method != SolverMethod::Gaussian)
      throw UnsupportedError("only elimination solvers apply to parametric systems");
  }
  switch (settings.method) {
    case SolverMethod::Gaussian:
      if (!sys.deterministic()) break;
      return gaussian_elimination(sys);
    case SolverMethod::Elimination:
      if (!sys.deterministic()) break;
      return state_elimination(sys);
    case SolverMethod::RationalSearch:
      if constexpr (std::is_same_v<N, Rational>) {
        if (sys.deterministic()) return rational_search(sys, settings);
        SolverSettings pi = settings;
        pi.method = SolverMethod::PolicyIteration;
        return policy_iteration(sys, pi);
      } else {
        throw UnsupportedError("rational search needs the exact number domain");
      }
    default:
      break;
  }
  if constexpr (T<N>::ordered) {
    switch (settings.method) {
      case SolverMethod::ValueIteration: return value_iteration(sys, settings);
      case SolverMethod::IntervalIteration: return interval_iteration(sys, settings);
      case SolverMethod::OptimisticValueIteration: return optimistic_value_iteration(sys, settings);
      default: {
        // Exact linear solvers on a system with choices: policy iteration
        // with that solver evaluating each policy.
        SolverSettings pi = settings;
        if (settings.method != SolverMethod::PolicyIteration) pi.policy_evaluation = settings.method;
        return policy_iteration(sys, pi);
      }
    }
  } else {
    throw UnsupportedError("parametric systems with choices are not supported");
  }
}

Rational simplest_rational_between(const Rational& lo_in, const Rational& hi_in) {
  Rational lo = lo_in, hi = hi_in;
  if (hi < lo) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (hi < 0) return -simplest_rational_between(-hi, -lo);
  // Continued fraction expansion shared by both ends of the interval.
  std::vector<Integer> terms;
  for (;;) {
    const Integer fl = floor(lo);
    if (lo.get_den() == 1) {
      terms.push_back(lo.get_num());
      break;
    }
    if (Rational(fl + 1) <= hi) {
      terms.push_back(fl + 1);
      break;
    }
    terms.push_back(fl);
    Rational nlo = 1 / (hi - fl), nhi = 1 / (lo - fl);
    lo = std::move(nlo);
    hi = std::move(nhi);
  }
  Rational v = terms.back();
  for (std::size_t i = terms.size() - 1; i-- > 0;) v = Rational(terms[i]) + 1 / v;
  v.canonicalize();
  return v;
}

namespace {

/// Jacobi value iteration on a deterministic system in a floating type,
/// stopping when successive iterates differ by at most `criterion`.
template <typename F>
std::vector<F> float_iterate(const std::vector<std::vector<std::pair<std::size_t, F>>>& rows,
                             const std::vector<F>& b, const F& criterion, const F& zero,
                             const SolverSettings& settings, std::size_t& iterations) {
  std::vector<F> x(b.size(), zero), y(b.size(), zero);
  for (;;) {
    if (++iterations > settings.max_iterations) no_convergence("rational search", settings.max_iterations);
    tick(settings);
    F diff = zero;
    for (std::size_t s = 0; s < b.size(); ++s) {
      F v = b[s];
      for (const auto& [t, p] : rows[s]) v += p * x[t];
      F d = v - x[s];
      if (d < zero) d = -d;
      if (diff < d) diff = d;
      y[s] = v;
    }
    std::swap(x, y);
    if (!(criterion < diff)) return x;
  }
}

}  // namespace

SolverOutcome<Rational> rational_search(const EquationSystem<Rational>& sys, const SolverSettings& settings) {
  if (!sys.deterministic()) throw SolverError("rational search needs one row per unknown");
  const std::size_t n = sys.size();
  SolverOutcome<Rational> out;
  auto verify = [&](const std::vector<Rational>& x) {
    for (std::size_t s = 0; s < n; ++s)
      if (row_value(sys, s, x) != x[s]) return false;
    return true;
  };
  auto round_all = [&](const std::vector<Rational>& approx, const Rational& eps) {
    std::vector<Rational> x(n);
    for (std::size_t s = 0; s < n; ++s) x[s] = simplest_rational_between(approx[s] - eps, approx[s] + eps);
    return x;
  };

  Rational eps = settings.precision;
  constexpr int max_rounds = 12;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<Rational> approx(n);
    if (eps >= Rational(1, 100000000000000)) {
      std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
      std::vector<double> b(n);
      for (std::size_t s = 0; s < n; ++s) {
        b[s] = sys.b[s].get_d();
        auto row = sys.matrix.row(s);
        for (std::size_t i = 0; i < row.size(); ++i) rows[s].emplace_back(row.column(i), row.value(i).get_d());
      }
      const auto x = float_iterate<double>(rows, b, eps.get_d() / 1000, 0.0, settings, out.iterations);
      for (std::size_t s = 0; s < n; ++s) approx[s] = Rational(x[s]);
    } else {
      // Bits for eps plus headroom for rounding during iteration.
      const mp_bitcnt_t bits = mpz_sizeinbase(eps.get_den_mpz_t(), 2) + 64;
      std::vector<std::vector<std::pair<std::size_t, mpf_class>>> rows(n);
      std::vector<mpf_class> b(n);
      for (std::size_t s = 0; s < n; ++s) {
        b[s] = mpf_class(sys.b[s], bits);
        auto row = sys.matrix.row(s);
        for (std::size_t i = 0; i < row.size(); ++i)
          rows[s].emplace_back(row.column(i), mpf_class(row.value(i), bits));
      }
      const mpf_class criterion(eps / 1000, bits), zero(0, bits);
      const auto x = float_iterate<mpf_class>(rows, b, criterion, zero, settings, out.iterations);
      for (std::size_t s = 0; s < n; ++s) mpq_set_f(approx[s].get_mpq_t(), x[s].get_mpf_t());
    }
    std::vector<Rational> candidate = round_all(approx, eps);
    if (verify(candidate)) {
      out.values = std::move(candidate);
      return out;
    }
    eps = eps * eps;
  }
  throw SolverError("rational search found no exact solution after " + std::to_string(max_rounds) + " rounds");
}

#define STORMLET_ORDERED(N)                                                                              \
  template EquationSystem<N> linear_system<N>(SparseMatrix<N>, std::vector<N>);                          \
  template std::vector<N> bellman_step<N>(const EquationSystem<N>&, const std::vector<N>&,               \
                                          std::vector<std::size_t>*);                                    \
  template SolverOutcome<N> value_iteration<N>(const EquationSystem<N>&, const SolverSettings&);         \
  template SolverOutcome<N> interval_iteration<N>(const EquationSystem<N>&, const SolverSettings&);      \
  template SolverOutcome<N> optimistic_value_iteration<N>(const EquationSystem<N>&, const SolverSettings&); \
  template SolverOutcome<N> gaussian_elimination<N>(const EquationSystem<N>&);                           \
  template SolverOutcome<N> state_elimination<N>(const EquationSystem<N>&, const std::vector<std::size_t>*); \
  template SolverOutcome<N> policy_iteration<N>(const EquationSystem<N>&, const SolverSettings&);        \
  template N reward_upper_bound<N>(const EquationSystem<N>&);                                            \
  template SolverOutcome<N> solve<N>(const EquationSystem<N>&, const SolverSettings&);

STORMLET_ORDERED(double)
STORMLET_ORDERED(Rational)
#undef STORMLET_ORDERED

template EquationSystem<RationalFunction> linear_system<RationalFunction>(SparseMatrix<RationalFunction>,
                                                                          std::vector<RationalFunction>);
template SolverOutcome<RationalFunction> gaussian_elimination<RationalFunction>(
    const EquationSystem<RationalFunction>&);
template SolverOutcome<RationalFunction> state_elimination<RationalFunction>(
    const EquationSystem<RationalFunction>&, const std::vector<std::size_t>*);
template SolverOutcome<RationalFunction> solve<RationalFunction>(const EquationSystem<RationalFunction>&,
                                                                 const SolverSettings&);

}  // namespace stormlet
