#include "sosforge/problems.hpp"

#include <chrono>
#include <sstream>

#include "sosforge/sdpa_io.hpp"

namespace sosforge {

namespace {

PPoly pvar(const std::string& n) { return ppoly_var(n); }

PPoly identity_grid(Index n, double v) {
  std::vector<std::vector<PPoly>> cells(n, std::vector<PPoly>(n, ppoly_constant(0.0)));
  for (Index i = 0; i < n; ++i) cells[i][i] = ppoly_constant(v);
  return ppoly_from_grid(cells);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemReport run_common(std::string name, SosProgram prog,
                         std::chrono::steady_clock::time_point t0, const RunOptions& ro) {
  ProblemReport rep;
  rep.name = std::move(name);
  SdpProblem sdp = assemble(prog);
  rep.build_seconds = seconds_since(t0);
  rep.n_ivars = static_cast<Index>(prog.ivars.size());
  rep.n_dvars = static_cast<Index>(prog.registry.size());
  rep.n_rows = sdp.A.rows;
  rep.n_vec = sdp.nvec();
  rep.n_free = sdp.nfree;
  rep.block_sides = sdp.blocks;
  rep.warnings = prog.warnings;

  Index max_side = 0;
  for (Index s : sdp.blocks) max_side = std::max(max_side, s);
  const bool within = sdp.nvec() <= kMaxVecDim && max_side <= kMaxBlockSide;

  if (ro.mode == RunMode::Export) {
    export_sdpa(sdp, ro.export_path);
    rep.exported_path = ro.export_path;
    return rep;
  }
  if (ro.mode == RunMode::Auto && !within) {
    if (!ro.export_path.empty()) {
      export_sdpa(sdp, ro.export_path);
      rep.exported_path = ro.export_path;
      rep.message = "over embedded-solver capacity; exported SDPA data";
    } else {
      rep.message = "over embedded-solver capacity; rerun with --export PATH";
    }
    return rep;
  }

  auto ts = std::chrono::steady_clock::now();
  Solution sol = solve_small(sdp, ro.solve);
  rep.solve_seconds = seconds_since(ts);
  rep.solved = true;
  rep.status = sol.status;
  rep.objective = sdp.maximize ? -sol.obj_primal : sol.obj_primal;
  rep.iterations = sol.iterations;
  rep.message = sol.message;
  return rep;
}

}  // namespace

SosProgram build_glb(Index dmax, double box_halfwidth) {
  if (dmax < 2 || dmax % 2 != 0) throw ArgumentError("build_glb: dmax must be even and >= 2");
  SosProgram prog;
  declare_ivars(prog, {"x1", "x2"});
  const PPoly x1 = pvar("x1"), x2 = pvar("x2");

  // f = x1^4 + x2^4 - 2 x2 x1^3 - 3 x2^2 x1^2 + 150 (x1^2 + x2^2)
  const PPoly x1sq = ppoly_mul(x1, x1), x2sq = ppoly_mul(x2, x2);
  PPoly f = ppoly_pow(x1, 4);
  f = ppoly_add(f, ppoly_pow(x2, 4));
  f = ppoly_add(f, ppoly_scale(ppoly_mul(x2, ppoly_pow(x1, 3)), -2.0));
  f = ppoly_add(f, ppoly_scale(ppoly_mul(x2sq, x1sq), -3.0));
  f = ppoly_add(f, ppoly_scale(ppoly_add(x1sq, x2sq), 150.0));

  const double h2 = box_halfwidth * box_halfwidth;
  const PPoly g[3] = {
      ppoly_add(ppoly_constant(h2), ppoly_scale(x1sq, -1.0)),
      ppoly_add(ppoly_constant(h2), ppoly_scale(x2sq, -1.0)),
      ppoly_add(ppoly_constant(2.0 * h2), ppoly_scale(ppoly_add(x1sq, x2sq), -1.0)),
  };

  DPoly gamma = declare_decvar(prog, "gamma");
  DPoly expr = add(from_ppoly(f), scale(gamma, -1.0));
  const DegreeMatrix z = full_basis(prog.ivars, static_cast<Degree>(dmax));
  for (const PPoly& gi : g) {
    DPoly si = sosvar(prog, z);
    expr = add(expr, scale(mul_poly(si, gi, Side::Right), -1.0));
  }
  sos_ineq(prog, expr);
  set_objective(prog, {{"gamma", 1.0}}, /*maximize=*/true);
  return prog;
}

SosProgram build_robust(Index n) {
  if (n < 1) throw ArgumentError("build_robust: n must be >= 1");
  SosProgram prog;
  declare_ivars(prog, {"p1", "p2"});
  const PPoly p1 = pvar("p1"), p2 = pvar("p2");

  // A(p): diagonal 1, strictly below 0.25 p1, strictly above -0.25 p2.
  std::vector<std::vector<PPoly>> cells(n, std::vector<PPoly>(n, ppoly_constant(0.0)));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j)
        cells[i][j] = ppoly_constant(1.0);
      else if (i > j)
        cells[i][j] = ppoly_scale(p1, 0.25);
      else
        cells[i][j] = ppoly_scale(p2, -0.25);
    }
  const PPoly A = ppoly_from_grid(cells);
  const PPoly gball =
      ppoly_add(ppoly_constant(1.0),
                ppoly_scale(ppoly_add(ppoly_mul(p1, p1), ppoly_mul(p2, p2)), -1.0));

  const DegreeMatrix z2 = full_basis(prog.ivars, 2);
  DPoly P = polymatrixvar(prog, z2, n, n, QuadOption::Sym);
  DPoly Q = polymatrixvar(prog, z2, n, n, QuadOption::Sym);

  const double eps = 1e-4;
  matrix_ineq(prog, add(P, from_ppoly(identity_grid(n, -eps))));
  matrix_ineq(prog, Q);
  DPoly resid = mul_poly(Q, gball, Side::Right);
  resid = add(resid, mul_poly(P, A, Side::Right));                   // P A
  resid = add(resid, mul_poly(P, ppoly_transpose(A), Side::Left));   // A' P
  matrix_ineq(prog, scale(resid, -1.0));
  return prog;
}

SosProgram build_localstab(Index n) {
  if (n < 1) throw ArgumentError("build_localstab: n must be >= 1");
  SosProgram prog;
  std::vector<std::string> ynames(n), znames(n);
  for (Index j = 0; j < n; ++j) {
    ynames[j] = "y" + std::to_string(j + 1);
    znames[j] = "z" + std::to_string(j + 1);
  }
  std::vector<std::string> all = ynames;
  all.insert(all.end(), znames.begin(), znames.end());
  declare_ivars(prog, all);

  // Chain of Van der Pol oscillators, coupling eps_j = -0.5, ball radius 0.5.
  const double mu2 = 10.0 * 1.2 * 1.2;
  const double nu = 10.0 * 0.21;
  std::vector<PPoly> f;
  f.reserve(2 * n);
  for (Index i = 0; i < n; ++i) f.push_back(ppoly_scale(pvar(znames[i]), -2.0));
  for (Index j = 0; j < n; ++j) {
    const PPoly yj = pvar(ynames[j]), zj = pvar(znames[j]);
    PPoly fj = ppoly_scale(yj, 0.8);
    fj = ppoly_add(fj, ppoly_scale(ppoly_mul(ppoly_mul(yj, yj), zj), mu2));
    fj = ppoly_add(fj, ppoly_scale(zj, -nu));
    if (j + 1 < n) fj = ppoly_add(fj, ppoly_scale(ppoly_mul(pvar(znames[j + 1]), yj), -0.5));
    f.push_back(fj);
  }

  const double r = 0.5;
  PPoly gball = ppoly_constant(r * r);
  for (const std::string& v : all)
    gball = ppoly_add(gball, ppoly_scale(ppoly_mul(pvar(v), pvar(v)), -1.0));

  const DegreeMatrix z2 = full_basis(prog.ivars, 2);
  DPoly V = sosvar(prog, z2);
  DPoly s = sosvar(prog, z2);

  DPoly expr = scale(mul_poly(s, gball, Side::Right), -1.0);
  for (Index k = 0; k < 2 * n; ++k) {
    const std::string& xk = k < n ? ynames[k] : znames[k - n];
    expr = add(expr, scale(mul_poly(diff(V, xk), f[k], Side::Right), -1.0));
  }
  sos_ineq(prog, expr);
  return prog;
}

ProblemReport run_glb(Index dmax, const RunOptions& ro, double box_halfwidth) {
  auto t0 = std::chrono::steady_clock::now();
  return run_common("glb", build_glb(dmax, box_halfwidth), t0, ro);
}

ProblemReport run_robust(Index n, const RunOptions& ro) {
  auto t0 = std::chrono::steady_clock::now();
  return run_common("robust", build_robust(n), t0, ro);
}

ProblemReport run_localstab(Index n, const RunOptions& ro) {
  auto t0 = std::chrono::steady_clock::now();
  return run_common("localstab", build_localstab(n), t0, ro);
}

std::string format_report(const ProblemReport& rep) {
  std::ostringstream os;
  os << "problem: " << rep.name << "\n";
  os << "ivars: " << rep.n_ivars << "  dvars: " << rep.n_dvars << "\n";
  os << "rows: " << rep.n_rows << "  vec dim: " << rep.n_vec << "  free: " << rep.n_free
     << "  psd blocks:";
  for (Index s : rep.block_sides) os << " " << s;
  os << "\n";
  os << "build time: " << rep.build_seconds << " s\n";
  for (const std::string& w : rep.warnings) os << "warning: " << w << "\n";
  if (!rep.exported_path.empty()) os << "exported: " << rep.exported_path << "\n";
  if (rep.solved) {
    os << "status: " << to_string(rep.status) << "  iterations: " << rep.iterations
       << "  solve time: " << rep.solve_seconds << " s\n";
    if (rep.status == SolveStatus::Optimal) os << "objective: " << rep.objective << "\n";
  }
  if (!rep.message.empty()) os << "note: " << rep.message << "\n";
  return os.str();
}

}  // namespace sosforge
