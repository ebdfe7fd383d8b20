#include <doctest.h>

#include <random>

#include "stormlet/parametric.hpp"
#include "support.hpp"

using namespace stormlet;

namespace {

Model<RationalFunction> parametric_model(const std::string& file) {
  const Program prog = parse_program_file(test::model_path(file));
  BuildOptions o;
  o.parameters = undefined_constants(prog, {});
  return build_model<RationalFunction>(prog, o);
}

Rational exact_at(const Model<RationalFunction>& m, const Property& p, const ParameterPoint& at) {
  CheckSettings s;
  s.solver.method = SolverMethod::Gaussian;
  return check(instantiate(m, at), p, s).value_at_initial().value;
}

struct Case {
  std::string file;
  std::string property;
};

const std::vector<Case> kCases = {
    {"pdie.pm", "P=? [F \"one\"]"},
    {"pdie.pm", "P=? [F \"six\"]"},
    {"pcoins.pm", "P=? [F \"win\"]"},
    {"pcoins.pm", "R{\"flips\"}=? [F \"end\"]"},
};

}  // namespace

TEST_CASE("solution functions agree with instantiated exact solving") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<long> pick(1, 96);
  for (const auto& c : kCases) {
    const auto m = parametric_model(c.file);
    const auto p = parse_property(c.property);
    const RationalFunction f = solution_function(m, p);
    CAPTURE(c.property);
    for (int i = 0; i < 10; ++i) {
      ParameterPoint at;
      for (const auto& name : model_parameters(m)) at[name] = test::frac(pick(rng), 97);
      CHECK(f.evaluate(at) == exact_at(m, p, at));
    }
  }
}

TEST_CASE("known solution function") {
  const auto m = parametric_model("pdie.pm");
  const auto p = RationalFunction(Polynomial::variable("p"));
  const RationalFunction one(Rational(1));
  CHECK(solution_function(m, parse_property("P=? [F \"one\"]")) == p * p / (p + one));
}

TEST_CASE("region bounds bracket sampled instantiations") {
  std::mt19937 rng(43);
  std::uniform_int_distribution<long> pick(5, 90);
  for (const auto& c : kCases) {
    if (c.property[0] != 'P') continue;
    const auto m = parametric_model(c.file);
    const auto p = parse_property(c.property);
    for (int trial = 0; trial < 3; ++trial) {
      Region region;
      for (const auto& name : model_parameters(m)) {
        Rational a = test::frac(pick(rng), 97), b = test::frac(pick(rng), 97);
        if (b < a) std::swap(a, b);
        region[name] = {a, b};
      }
      const Interval bounds = region_lifting(m, p, region);
      CHECK(bounds.lower <= bounds.upper);
      std::uniform_int_distribution<long> step(0, 1000);
      for (int i = 0; i < 10; ++i) {
        ParameterPoint at;
        for (const auto& [name, iv] : region) at[name] = iv.lower + (iv.upper - iv.lower) * test::frac(step(rng), 1000);
        const Rational v = exact_at(m, p, at);
        CHECK(bounds.lower <= v);
        CHECK(v <= bounds.upper);
      }
    }
  }
}

TEST_CASE("degenerate region collapses to the point value") {
  const auto m = parametric_model("pcoins.pm");
  const auto p = parse_property("P=? [F \"win\"]");
  const Region region = parse_region("3/10<=p<=3/10,3/5<=q<=3/5");
  const Interval bounds = region_lifting(m, p, region);
  const Rational v = exact_at(m, p, {{"p", Rational(3, 10)}, {"q", Rational(3, 5)}});
  CHECK(bounds.lower == v);
  CHECK(bounds.upper == v);
  CHECK(v == Rational(9, 23));
}

TEST_CASE("parameter text") {
  const auto point = parse_point("p=1/2, q=0.25");
  CHECK(point.at("p") == Rational(1, 2));
  CHECK(point.at("q") == Rational(1, 4));
  const auto region = parse_region("0.3<=p<=0.6");
  CHECK(region.at("p").lower == Rational(3, 10));
  CHECK(region.at("p").upper == Rational(3, 5));
  CHECK_THROWS_AS(parse_point("p"), ModelError);
  CHECK_THROWS_AS(parse_region("0.6<=p<=0.3"), ModelError);
  CHECK_THROWS_AS(parse_region("p<=0.3"), ModelError);
}

TEST_CASE("invalid instantiations") {
  const auto m = parametric_model("pdie.pm");
  CHECK_THROWS_AS(instantiate(m, {{"p", Rational(2)}}), ModelError);
  CHECK_THROWS_AS(instantiate(m, {}), ModelError);
}
