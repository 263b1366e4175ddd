#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "sosforge/errors.hpp"
#include "sosforge/solver.hpp"
#include "sosforge/sosprog.hpp"

using namespace sosforge;

namespace {

bool vec_eq(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

void check_weak_duality(const Solution& sol) {
  for (const IterStat& it : sol.trace) CHECK(it.obj_dual <= it.obj_primal + 1e-6);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("a bounded scalar maximization hits its cap") {
  // max gamma subject to gamma + s = 5, s in the one-dimensional cone
  SosProgram prog;
  DPoly g = declare_decvar(prog, "gamma");
  DPoly s = sosvar(prog, constant_basis());
  eq_constraint(prog, add(add(g, s), from_ppoly(ppoly_constant(-5.0))));
  set_objective(prog, {{"gamma", 1.0}}, true);
  SdpProblem sdp = assemble(prog);
  REQUIRE(sdp.nfree == 1);
  REQUIRE(sdp.blocks == std::vector<Index>{1});

  Solution sol = solve_small(sdp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(-sol.obj_primal - 5.0) <= 1e-6);
  CHECK(std::abs(sol.x[sdp.varmap.at("gamma")] - 5.0) <= 1e-6);
  check_weak_duality(sol);
}

TEST_CASE("the smallest trace with a pinned corner is one") {
  // min tr X subject to X11 = 1, X a 2x2 cone block
  SdpProblem sdp;
  sdp.blocks = {2};
  sdp.A = from_triplets<double>({0}, {0}, {1.0}, 1, 4);
  sdp.b = Eigen::VectorXd::Constant(1, 1.0);
  sdp.c = Eigen::VectorXd::Zero(4);
  sdp.c[0] = 1.0;
  sdp.c[3] = 1.0;

  Solution sol = solve_small(sdp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(sol.obj_primal - 1.0) <= 1e-6);
  CHECK(std::abs(sol.x[0] - 1.0) <= 1e-6);
  CHECK(std::abs(sol.x[3]) <= 1e-6);
  check_weak_duality(sol);
}

TEST_CASE("a pinned free variable solves without any cone") {
  SosProgram prog;
  DPoly g = declare_decvar(prog, "gamma");
  eq_constraint(prog, add(g, from_ppoly(ppoly_constant(-1.0))));
  set_objective(prog, {{"gamma", 1.0}}, true);
  Solution sol = solve_small(assemble(prog));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(-sol.obj_primal - 1.0) <= 1e-6);
  check_weak_duality(sol);
}

TEST_CASE("a negative constant cannot be a sum of squares") {
  SosProgram prog;
  sos_ineq(prog, from_ppoly(ppoly_constant(-1.0)));
  Solution sol = solve_small(assemble(prog));
  CHECK(sol.status != SolveStatus::Optimal);
}

TEST_CASE("a cone variable pinned to a negative value is infeasible") {
  SdpProblem sdp;
  sdp.blocks = {1};
  sdp.A = from_triplets<double>({0}, {0}, {1.0}, 1, 1);
  sdp.b = Eigen::VectorXd::Constant(1, -1.0);
  sdp.c = Eigen::VectorXd::Zero(1);
  Solution sol = solve_small(sdp);
  CHECK(sol.status == SolveStatus::Infeasible);
  // the deflated dual value diverges upward here: that growth is the
  // infeasibility certificate, so no duality check applies
}

TEST_CASE("a constant-only contradictory row short-circuits to infeasible") {
  SosProgram prog;
  eq_constraint(prog, from_ppoly(ppoly_constant(5.0)));
  SdpProblem sdp = assemble(prog);
  REQUIRE(sdp.trivially_infeasible);
  Solution sol = solve_small(sdp);
  CHECK(sol.status == SolveStatus::Infeasible);
  CHECK(!sol.message.empty());
}

TEST_CASE("an empty problem is vacuously optimal") {
  Solution sol = solve_small(assemble(SosProgram{}));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.obj_primal == 0.0);
}

TEST_CASE("oversized problems are refused rather than attempted") {
  SdpProblem sdp;
  sdp.blocks = {71};  // 71*71 = 5041 vectorized entries
  sdp.A = from_triplets<double>({}, {}, {}, 0, 71 * 71);
  sdp.b = Eigen::VectorXd(0);
  sdp.c = Eigen::VectorXd::Zero(71 * 71);
  CHECK_THROWS_AS(solve_small(sdp), CapacityError);
}

TEST_CASE("solves are deterministic") {
  SdpProblem sdp;
  sdp.blocks = {2};
  sdp.A = from_triplets<double>({0}, {0}, {1.0}, 1, 4);
  sdp.b = Eigen::VectorXd::Constant(1, 1.0);
  sdp.c = Eigen::VectorXd::Zero(4);
  sdp.c[0] = 1.0;
  sdp.c[3] = 1.0;
  Solution a = solve_small(sdp);
  Solution b = solve_small(sdp);
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(vec_eq(a.x, b.x));
  CHECK(vec_eq(a.y, b.y));
}

TEST_CASE("status values render as text") {
  CHECK(std::string(to_string(SolveStatus::Optimal)) == "optimal");
  CHECK(std::string(to_string(SolveStatus::Infeasible)) == "infeasible");
}

}  // TEST_SUITE
