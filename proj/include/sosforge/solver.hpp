#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "sosforge/sosprog.hpp"

namespace sosforge {

enum class SolveStatus { Optimal, Infeasible, MaxIter, Numerical };

const char* to_string(SolveStatus s);

// Per-iteration diagnostics. Objectives are the homogeneous iterate's
// deflated values c'x/tau and b'y/tau. On runs that terminate optimal the
// dual value never exceeds the primal value along the path; on infeasible
// instances tau -> 0 and the deflated dual value diverges upward, which is
// the infeasibility certificate itself.
struct IterStat {
  double obj_primal;
  double obj_dual;
  double pres;
  double dres;
  double gap;
  double mu;
  double tau;
  double kappa;
};

struct Solution {
  SolveStatus status = SolveStatus::Numerical;
  Eigen::VectorXd x;  // full vectorized point, free variables included
  Eigen::VectorXd y;  // one multiplier per row of A
  double obj_primal = 0.0;  // c'x in minimization form
  double obj_dual = 0.0;    // b'y
  Index iterations = 0;
  std::string message;
  std::vector<IterStat> trace;
};

struct SolveOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  Index max_iter = 200;
  bool verbose = false;
};

// Dense-factorization interior-point method for desk-scale problems:
// free variables are eliminated against the equality rows by a rank-revealing
// QR pivot, and the conic core is solved by a homogeneous self-dual embedding
// with Nesterov-Todd scaling and a predictor-corrector step.
//
// Intended envelope: total vectorized dimension <= kMaxVecDim and block side
// <= kMaxBlockSide; larger problems throw CapacityError (export them instead).
inline constexpr Index kMaxVecDim = 5000;
inline constexpr Index kMaxBlockSide = 120;

Solution solve_small(const SdpProblem& sdp, const SolveOptions& opt = {});

}  // namespace sosforge
