#include <doctest.h>

#include "stormlet/builder.hpp"
#include "stormlet/prism.hpp"
#include "support.hpp"

using namespace stormlet;
using test::model_path;

namespace {

const char* kCoin = R"(dtmc
const double p = 0.5;
module coin
  s : [0..2] init 0;
  [] s=0 -> p : (s'=1) + 1-p : (s'=2);
  [] s>0 -> true;
endmodule
label "heads" = s=1;
)";

std::size_t error_line(const std::string& text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("bundled programs survive a print and parse round trip") {
  for (const auto& b : test::benchmarks()) {
    if (b.file.empty()) continue;
    CAPTURE(b.file);
    const Program p = parse_program_file(model_path(b.file));
    CHECK(parse_program(to_string(p)) == p);
  }
}

TEST_CASE("accepted syntax") {
  CHECK_NOTHROW(parse_program(kCoin));
  CHECK(parse_program(kCoin).kind == ModelKind::Dtmc);
  CHECK(parse_program("mdp\nmodule m\n x : bool init false;\n [a] !x -> (x'=true);\n [b] x -> true;\nendmodule\n")
            .modules[0]
            .commands.size() == 2);
  // Module renaming copies the commands with substituted names.
  const Program renamed = parse_program(
      "dtmc\nmodule a\n x : [0..1] init 0;\n [] x=0 -> 0.5:(x'=1) + 0.5:true;\nendmodule\nmodule b = a [x=y] endmodule\n");
  REQUIRE(renamed.modules.size() == 2);
  CHECK(renamed.modules[1].variables[0].name == "y");
  CHECK_NOTHROW(parse_program("ctmc\nmodule m\n s : [0..1] init 0;\n [] s=0 -> 3 : (s'=1);\nendmodule\n"));
  CHECK_NOTHROW(parse_program("dtmc\nformula f = x+1;\nmodule m\n x : [0..3] init 0;\n [] f<3 -> (x'=f);\nendmodule\n"));
  CHECK_NOTHROW(parse_program(
      "dtmc\nmodule m\n x : [0..1] init 0;\n [] true -> (x'=1-x);\nendmodule\nrewards\n x=1 : 2;\n [] true : 1;\nendrewards\n"));
}

TEST_CASE("rejected syntax reports the line") {
  CHECK(error_line("dtmc\nmodule m\n x : [0..1] init 0\n [] true -> true;\nendmodule\n") == 4);
  CHECK(error_line("dtmc\nmodule m\n x : [0..1] init 0;\n [] true -> 0.5 (x'=1);\nendmodule\n") == 4);
  CHECK(error_line("pomdp\nmodule m\nendmodule\n") == 1);
  CHECK(error_line("dtmc\nmodule m\n x : [0..1] init 0;\n [] true -> (x'=1)\nendmodule\n") == 5);
  CHECK(error_line("dtmc\nmodule m\n x : [0..1] init 0;\nendmodule\nlabel \"a\" = ;\n") == 5);
  CHECK_THROWS_AS(parse_program("dtmc\nmodule m\n x : [0..1] init 0;\n x : [0..1] init 0;\nendmodule\n"), Error);
}

TEST_CASE("constant bindings") {
  const auto b = parse_constant_bindings("N=3,p=0.1,flag=true");
  CHECK(b.size() == 3);
  CHECK_THROWS_AS(parse_constant_bindings("N"), Error);
  const Program pc = parse_program_file(model_path("pcoins.pm"));
  CHECK(undefined_constants(pc, {}) == std::set<std::string>{"p", "q"});
  CHECK(undefined_constants(pc, parse_constant_bindings("p=0.1")) == std::set<std::string>{"q"});
  CHECK_THROWS_AS(build_model<double>(pc), ModelError);
}

TEST_CASE("state space sizes") {
  CHECK(build_model<Rational>(parse_program_file(model_path("die.pm"))).state_count() == 13);
  CHECK(build_model<Rational>(parse_program_file(model_path("herman3.pm"))).state_count() == 8);
  const auto brp = build_model<Rational>(parse_program_file(model_path("brp.pm")));
  CHECK(brp.state_count() == 677);
  CHECK(brp.transition_count() == 867);
  const auto grid = build_model<Rational>(parse_program_file(model_path("grid.nm")));
  CHECK(grid.kind == ModelKind::Mdp);
  CHECK(grid.row_count() > grid.state_count());
}

TEST_CASE("built models are well formed") {
  for (const auto& b : test::benchmarks()) {
    if (b.file.empty()) continue;
    CAPTURE(b.file);
    const auto m = test::load<Rational>(b);
    CHECK_FALSE(validate(m).has_value());
  }
}

TEST_CASE("deadlocks") {
  const std::string text = "dtmc\nmodule m\n x : [0..1] init 0;\n [] x=0 -> (x'=1);\nendmodule\n";
  CHECK_THROWS_AS(build_model<double>(parse_program(text)), BuildError);
  BuildOptions o;
  o.fix_deadlocks = true;
  std::vector<std::string> warnings;
  o.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  const auto m = build_model<double>(parse_program(text), o);
  CHECK(m.state_count() == 2);
  CHECK(m.transition_count() == 2);
}

TEST_CASE("overlapping guards in a DTMC are weighted uniformly") {
  const std::string text =
      "dtmc\nmodule m\n x : [0..2] init 0;\n [] x=0 -> (x'=1);\n [] x=0 -> (x'=2);\n [] x>0 -> true;\nendmodule\n";
  std::vector<std::string> warnings;
  BuildOptions o;
  o.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  const auto m = build_model<Rational>(parse_program(text), o);
  const auto row = m.transitions.row(m.choices.first_row(0));
  REQUIRE(row.size() == 2);
  CHECK(row.value(0) == Rational(1, 2));
  CHECK(row.value(1) == Rational(1, 2));
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("synchronisation multiplies probabilities") {
  const std::string text =
      "dtmc\nmodule a\n x : [0..1] init 0;\n [go] x=0 -> 0.5:(x'=1) + 0.5:true;\n [go] x=1 -> true;\nendmodule\n"
      "module b\n y : [0..1] init 0;\n [go] y=0 -> 0.5:(y'=1) + 0.5:true;\n [go] y=1 -> true;\nendmodule\n";
  const auto m = build_model<Rational>(parse_program(text));
  CHECK(m.state_count() == 4);
  const auto row = m.transitions.row(0);
  CHECK(row.size() == 4);
  for (std::size_t i = 0; i < row.size(); ++i) CHECK(row.value(i) == Rational(1, 4));
}
