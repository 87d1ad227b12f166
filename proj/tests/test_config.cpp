#include <doctest.h>

#include <string>

#include "emoc/config.hpp"
#include "emoc/errors.hpp"

using namespace emoc;

TEST_SUITE("config") {

TEST_CASE("defaults survive an empty text") {
  RunConfig c = parse_config("");
  CHECK(c.problem == "lshape");
  CHECK(c.mode == "adaptive");
  CHECK(c.theta == 0.5);
  CHECK(c.alpha < 0.0);
  CHECK(c.marking == "doerfler");
  CHECK(c.max_iters == 100);
  CHECK(c.max_dofs == 50000);
  CHECK(c.eta_tol == 0.0);
  CHECK(c.subdivisions == 0);
  CHECK(c.quad_degree == 4);
  CHECK(c.quad_degree_singular == 5);
  CHECK(c.output_dir == "out");
  CHECK(c.seed == 0u);
}

TEST_CASE("key = value lines with comments and blanks") {
  RunConfig c = parse_config("# a comment\n"
                             "problem = inclusion\n"
                             "\n"
                             "  theta=0.3   # trailing comment\n"
                             "max_iters = 7\n"
                             "output_dir = /tmp/somewhere\n"
                             "seed = 42\n");
  CHECK(c.problem == "inclusion");
  CHECK(c.theta == 0.3);
  CHECK(c.max_iters == 7);
  CHECK(c.output_dir == "/tmp/somewhere");
  CHECK(c.seed == 42u);
}

TEST_CASE("unknown keys are rejected with the inventory") {
  try {
    parse_config("thetta = 0.5\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    std::string msg = e.what();
    CHECK(msg.find("thetta") != std::string::npos);
    CHECK(msg.find("theta") != std::string::npos);
    CHECK(msg.find("max_dofs") != std::string::npos);
  }
}

TEST_CASE("malformed lines and values") {
  CHECK_THROWS_AS(parse_config("theta\n"), InputError);
  CHECK_THROWS_AS(parse_config("theta =\n"), InputError);
  CHECK_THROWS_AS(parse_config("= 0.5\n"), InputError);
  CHECK_THROWS_AS(parse_config("theta = x\n"), InputError);
  CHECK_THROWS_AS(parse_config("theta = 0.5z\n"), InputError);
  CHECK_THROWS_AS(parse_config("max_iters = 2.5\n"), InputError);
}

TEST_CASE("range validation") {
  CHECK_THROWS_AS(parse_config("theta = 0\n"), InputError);
  CHECK_THROWS_AS(parse_config("theta = 1\n"), InputError);
  CHECK_THROWS_AS(parse_config("theta = 1.5\n"), InputError);
  CHECK_THROWS_AS(parse_config("gamma = 0\n"), InputError);
  CHECK_THROWS_AS(parse_config("gamma = 1.01\n"), InputError);
  CHECK_NOTHROW(parse_config("gamma = 1\n"));
  CHECK_THROWS_AS(parse_config("mode = fast\n"), InputError);
  CHECK_THROWS_AS(parse_config("marking = random\n"), InputError);
  CHECK_THROWS_AS(parse_config("max_iters = -1\n"), InputError);
  CHECK_THROWS_AS(parse_config("max_dofs = 0\n"), InputError);
  CHECK_THROWS_AS(parse_config("cg_tol = 0\n"), InputError);
  CHECK_THROWS_AS(parse_config("pg_tol = -1e-8\n"), InputError);
  CHECK_THROWS_AS(parse_config("quad_degree = 0\n"), InputError);
  CHECK_THROWS_AS(parse_config("quad_degree = 6\n"), InputError);
  CHECK_THROWS_AS(parse_config("quad_degree_singular = 9\n"), InputError);
  CHECK_THROWS_AS(parse_config("alpha = 0\n"), InputError);

  RunConfig bad;
  bad.theta = 2.0;
  CHECK_THROWS_AS(validate_config(bad), InputError);
}

TEST_CASE("resolve_problem applies overrides") {
  RunConfig c = parse_config("problem = lshape\n");
  ProblemSpec p = resolve_problem(c);
  CHECK(p.name == "lshape");
  CHECK(p.alpha == 0.1); // problem default kept when alpha is unset

  c = parse_config("problem = inclusion\nalpha = 0.7\nquad_degree = 3\n");
  p = resolve_problem(c);
  CHECK(p.name == "inclusion");
  CHECK(p.alpha == 0.7);
  CHECK(p.quad_degree == 3);

  c.problem = "heat";
  CHECK_THROWS_AS(resolve_problem(c), InputError);
}

TEST_CASE("to_adaptive_config mirrors the run options") {
  RunConfig c = parse_config("mode = uniform\ntheta = 0.4\nmax_dofs = 123\n"
                             "max_iters = 9\nsubdivisions = 3\nseed = 5\n");
  AdaptiveConfig a = to_adaptive_config(c);
  CHECK(a.uniform);
  CHECK(a.theta == 0.4);
  CHECK(a.max_dofs == 123);
  CHECK(a.max_iterations == 9);
  CHECK(a.subdivisions == 3);
  CHECK(a.seed == 5u);

  c.mode = "adaptive";
  CHECK_FALSE(to_adaptive_config(c).uniform);
}

} // TEST_SUITE
