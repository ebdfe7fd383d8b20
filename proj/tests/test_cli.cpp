#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "stormlet/cli.hpp"
#include "support.hpp"

using namespace stormlet;
using test::model_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string result_line(const std::string& out) {
  const auto pos = out.rfind("Result (for initial states): ");
  REQUIRE(pos != std::string::npos);
  return out.substr(pos, out.find('\n', pos) - pos);
}

}  // namespace

TEST_CASE("exact die report") {
  const auto r = run({"--prism", model_path("die.pm"), "--prop", "P=?[F \"one\"]", "--exact"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "Model: DTMC with 13 states and 20 transitions\n"
        "\n"
        "Model checking property \"P=? [F \"one\"]\" ...\n"
        "Result (for initial states): 1/6\n");
}

TEST_CASE("explicit input") {
  const auto r = run({"--explicit", model_path("three.tra"), model_path("three.lab"), "--prop", "P=?[F \"t\"]"});
  CHECK(r.code == 0);
  CHECK(result_line(r.out) == "Result (for initial states): 0.5");
  const auto rew = run({"--explicit", model_path("choice.tra"), model_path("choice.lab"), "--staterew",
                        model_path("choice.rew"), "--prop", "Rmin=? [F \"t\"]", "--exact"});
  CHECK(rew.code == 0);
  CHECK(result_line(rew.out) == "Result (for initial states): 1");
}

TEST_CASE("solver selection") {
  for (const std::string solver : {"vi", "ii", "ovi", "exact", "elimination", "pi"}) {
    CAPTURE(solver);
    const auto r = run({"--prism", model_path("die.pm"), "--prop", "P=?[F \"one\"]", "--eqsolver", solver});
    CHECK(r.code == 0);
    CHECK(result_line(r.out) == "Result (for initial states): 0.166667");
  }
  const auto sound = run({"--prism", model_path("die.pm"), "--prop", "P=?[F \"one\"]", "--sound", "--json"});
  const auto doc = nlohmann::json::parse(sound.out);
  CHECK(doc["results"][0].contains("lower"));
  CHECK(doc["results"][0].contains("upper"));
}

TEST_CASE("property files and names") {
  const auto r = run({"--prism", model_path("die.pm"), "--prop", model_path("die.props"), "--exact"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Model checking property \"flips\" ...\nResult (for initial states): 11/3\n") != std::string::npos);
}

TEST_CASE("constants, thresholds and ranges") {
  const auto r = run({"--prism", model_path("pcoins.pm"), "--constants", "p=0.3,q=0.6", "--prop", "P=? [F \"win\"]",
                      "--exact"});
  CHECK(result_line(r.out) == "Result (for initial states): 9/23");
  const auto t = run({"--prism", model_path("die.pm"), "--prop", "P>0.2 [F \"one\"]"});
  CHECK(result_line(t.out) == "Result (for initial states): false");
  const auto h = run({"--prism", model_path("herman3.pm"), "--prop", "R{\"steps\"}=? [F \"stable\"]", "--exact"});
  CHECK(result_line(h.out) == "Result (for initial states): [0, 4/3]");
}

TEST_CASE("bisimulation flag") {
  const auto r = run({"--prism", model_path("die.pm"), "--prop", "P=?[F \"one\"]", "--exact", "--bisim"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Bisimulation quotient: 5 states") != std::string::npos);
  CHECK(result_line(r.out) == "Result (for initial states): 1/6");
}

TEST_CASE("parametric mode") {
  const auto f = run({"--prism", model_path("pdie.pm"), "--parametric", "--prop", "P=? [F \"one\"]"});
  CHECK(f.code == 0);
  CHECK(result_line(f.out) == "Result (for initial states): (p^2)/(p + 1)");
  const auto pt = run({"--prism", model_path("pdie.pm"), "--parametric", "--prop", "P=? [F \"one\"]", "--point", "p=1/2"});
  CHECK(result_line(pt.out) == "Result (for initial states): 1/6");
  const auto rg =
      run({"--prism", model_path("pdie.pm"), "--parametric", "--prop", "P=? [F \"one\"]", "--region", "0.4<=p<=0.6"});
  CHECK(result_line(rg.out) == "Result (for initial states): [8/95, 27/95]");
  const auto th =
      run({"--prism", model_path("pdie.pm"), "--parametric", "--prop", "P<0.3 [F \"one\"]", "--region", "0.4<=p<=0.6"});
  CHECK(result_line(th.out) == "Result (for initial states): true");
}

TEST_CASE("exit codes") {
  CHECK(run({"--prism", model_path("missing.pm"), "--prop", "P=? [F \"a\"]"}).code == kExitInputError);
  CHECK(run({"--prism", model_path("die.pm"), "--prop", "P=? [F"}).code == kExitInputError);
  CHECK(run({"--prism", model_path("die.pm"), "--prop", "P=? [F \"nothing\"]"}).code == kExitInputError);
  CHECK(run({"--prism", model_path("pcoins.pm"), "--prop", "P=? [F \"win\"]"}).code == kExitInputError);
  CHECK(run({"--prism", model_path("die.pm")}).code == kExitInputError);
  CHECK(run({"--prism", model_path("detour.nm"), "--prop", "P=? [F \"win\"]"}).code == kExitUnsupported);
  CHECK(run({"--prism", model_path("die.pm"), "--prop", "P=? [F \"one\"]", "--exact", "--eqsolver", "vi"}).code ==
        kExitUnsupported);
  CHECK(run({"--prism", model_path("die.pm"), "--prop", "P=? [F \"one\"]", "--engine", "dd"}).code == kExitUnsupported);
  CHECK(run({"--prism", model_path("brp.pm"), "--prop", "P=? [F \"error\"]", "--timeout", "0.000001"}).code ==
        kExitTimeout);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("a failing property does not stop the others") {
  const auto r = run({"--prism", model_path("detour.nm"), "--prop", "P=? [F \"win\"]; Pmax=? [F \"win\"]"});
  CHECK(r.code == kExitUnsupported);
  CHECK(result_line(r.out) == "Result (for initial states): 0.777778");
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("json report") {
  const auto r = run({"--prism", model_path("die.pm"), "--prop", model_path("die.props"), "--exact", "--json"});
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["model"]["states"] == 13);
  CHECK(doc["results"].size() == 8);
  CHECK(doc["results"][0]["name"] == "one");
  CHECK(doc["results"][0]["result"] == "1/6");
  CHECK(doc["results"][0]["initial_states"][0]["value"] == "1/6");
}

TEST_CASE("repeated runs are byte-identical") {
  const std::vector<std::vector<std::string>> invocations = {
      {"--prism", model_path("brp.pm"), "--prop", model_path("brp.props")},
      {"--prism", model_path("grid.nm"), "--prop", model_path("grid.props"), "--sound", "--json"},
      {"--prism", model_path("queue.pm"), "--prop", model_path("queue.props"), "--eqsolver", "ovi"},
  };
  for (const auto& args : invocations) {
    const auto a = run(args), b = run(args);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
    CHECK(a.code == b.code);
  }
}
