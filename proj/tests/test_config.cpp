#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "toml.hpp"
#include "wavedim/config.hpp"
#include "wavedim/error.hpp"

using namespace wavedim;
using std::numbers::pi;

TEST_CASE("toml subset") {
  const auto j = parse_toml(R"(# comment
title = "x # not a comment"
lit = 'C:\path'
n = 42
neg = -3
f = 1.5e-3
flag = true
arr = [1, 2.5,
  3]  # trailing
nested = [[1, 2], [3, 4],]

[a.b]
"quoted key" = false
[c]
v = 1_000
)");
  CHECK(j["title"] == "x # not a comment");
  CHECK(j["lit"] == "C:\\path");
  CHECK(j["n"] == 42);
  CHECK(j["neg"] == -3);
  CHECK(j["f"].get<double>() == doctest::Approx(1.5e-3));
  CHECK(j["flag"] == true);
  CHECK(j["arr"].size() == 3);
  CHECK(j["nested"][1][0] == 3);
  CHECK(j["a"]["b"]["quoted key"] == false);
  CHECK(j["c"]["v"] == 1000);
}

TEST_CASE("toml errors name the line") {
  CHECK_THROWS_AS(parse_toml("a = \n"), InvalidInput);
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_toml("[t]\n[t]\n"), InvalidInput);
  CHECK_THROWS_AS(parse_toml("x = {a = 1}\n"), InvalidInput);
  CHECK_THROWS_AS(parse_toml("x = [1, 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_toml("x = \"open\n"), InvalidInput);
  try {
    parse_toml("a = 1\nb = \n");
    FAIL("no throw");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("lengths") {
  CHECK(parse_length("pi") == doctest::Approx(pi));
  CHECK(parse_length("2*pi") == doctest::Approx(2 * pi));
  CHECK(parse_length("pi/2") == doctest::Approx(pi / 2));
  CHECK(parse_length("1.5") == doctest::Approx(1.5));
  CHECK_THROWS_AS(parse_length("tau"), InvalidInput);
  CHECK_THROWS_AS(parse_length("-1"), InvalidInput);
}

TEST_CASE("defaults and scenarios") {
  const RunConfig c = parse_config("");
  CHECK(c.scenario == Scenario::Rotational);
  CHECK(c.components == 2);
  CHECK(c.rotational);
  CHECK(c.sweep.gammas.size() == 4);

  const RunConfig g = parse_config("scenario = \"gradient-cubic\"\n[model]\ngamma = 0.3\n");
  CHECK(g.components == 1);
  CHECK_FALSE(g.rotational);
  REQUIRE(g.potential.size() == 1);
  CHECK(g.potential[0].coefficient == doctest::Approx(0.25));
  CHECK(g.potential[0].powers[0] == 4);
  CHECK(make_spec(g, 0.3, 8).gamma == 0.3);

  const RunConfig l = parse_config("scenario = \"linear\"\n[domain]\nlengths = [\"pi\", 2]\n");
  CHECK(l.potential.empty());
  CHECK(make_domain(l).dim() == 2);
  CHECK(make_domain(l).length(1) == doctest::Approx(2.0));
}

TEST_CASE("custom potential and forcing") {
  const RunConfig c = parse_config(R"(scenario = "custom"
[model]
components = 2
modes = 6
[potential]
terms = [[0.25, 4, 0], [0.25, 0, 4]]
[forcing]
entries = [[2, 1, 1.5]]
)");
  CHECK(c.potential.size() == 2);
  const NonlinearitySpec s = make_spec(c, 0.1, 6);
  CHECK(s.forcing(1, 0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(make_spec(c, 0.1, 1), InvalidInput);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[model]\nmodez = 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("scenario = \"chaos\"\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[model]\ngamma = -1\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[model]\nmodes = 0\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[model]\ncomponents = 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[sweep]\ngammas = [0.1, 0.2]\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[sweep]\ngammas = [0.2, 0.2]\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[sweep]\nbd_samples = 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("[domain]\nlength = 1\nlengths = [1]\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("scenario = \"linear\"\n[potential]\nterms = [[1, 2]]\n"), InvalidInput);
  CHECK_THROWS_AS(parse_config("scenario = \"custom\"\n[model]\ncomponents = 1\n[potential]\nterms = [[-1, 4]]\n"),
                  InvalidInput);
  CHECK_THROWS_AS(parse_config("scenario = \"linear\"\n[forcing]\nentries = [[0, 1, 1.0]]\n"), InvalidInput);
  CHECK_THROWS_AS(load_config("/nonexistent/file.toml"), InvalidInput);
}

TEST_CASE("canonical form and hash") {
  const RunConfig a = parse_config("seed = 3\nthreads = 4\nout_dir = \"x\"\n");
  const RunConfig b = parse_config("out_dir = \"y\"\nseed = 3\n");
  CHECK(canonical_json(a) == canonical_json(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  const RunConfig c = parse_config("seed = 4\n");
  CHECK(config_hash(a) != config_hash(c));
}
