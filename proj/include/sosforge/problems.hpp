#pragma once

#include <string>
#include <vector>

#include "sosforge/solver.hpp"
#include "sosforge/sosprog.hpp"

namespace sosforge {

// The three stock optimization problems shipped with the CLI:
//   glb        greatest lower bound of a quartic over a box, via Psatz
//   robust     robust stability of x' = A(p)x under a parameter-ball bound
//   localstab  local stability of a chain of Van der Pol oscillators
//
// build_* constructs the program; run_* assembles it and either solves with
// the embedded solver (within its capacity) or exports SDPA data.

SosProgram build_glb(Index dmax, double box_halfwidth = 12.0);
SosProgram build_robust(Index n);
SosProgram build_localstab(Index n);

enum class RunMode { Auto, Solve, Export };

struct RunOptions {
  RunMode mode = RunMode::Auto;
  std::string export_path;  // used when exporting
  SolveOptions solve;
};

struct ProblemReport {
  std::string name;
  double build_seconds = 0.0;  // program construction + SDP assembly
  Index n_ivars = 0;
  Index n_dvars = 0;
  Index n_rows = 0;
  Index n_vec = 0;
  Index n_free = 0;
  std::vector<Index> block_sides;
  bool solved = false;
  SolveStatus status = SolveStatus::Numerical;
  double objective = 0.0;  // in the program's own sense (max for glb)
  Index iterations = 0;
  double solve_seconds = 0.0;
  std::string message;
  std::string exported_path;
  std::vector<std::string> warnings;
};

ProblemReport run_glb(Index dmax, const RunOptions& ro = {}, double box_halfwidth = 12.0);
ProblemReport run_robust(Index n, const RunOptions& ro = {});
ProblemReport run_localstab(Index n, const RunOptions& ro = {});

std::string format_report(const ProblemReport& rep);

}  // namespace sosforge
