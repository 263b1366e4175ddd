#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sosforge/bench.hpp"
#include "sosforge/poly_parse.hpp"
#include "sosforge/problems.hpp"

namespace {

struct RunFlags {
  bool solve = false;
  std::string export_path;
  bool verbose = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& rf) {
  auto* s = cmd->add_flag("--solve", rf.solve, "solve with the embedded solver");
  auto* e = cmd->add_option("--export", rf.export_path, "write SDPA sparse data to PATH");
  s->excludes(e);
  cmd->add_flag("--verbose", rf.verbose, "per-iteration solver log on stderr");
}

sosforge::RunOptions to_run_options(const RunFlags& rf) {
  sosforge::RunOptions ro;
  if (rf.solve) ro.mode = sosforge::RunMode::Solve;
  if (!rf.export_path.empty()) {
    ro.mode = sosforge::RunMode::Export;
    ro.export_path = rf.export_path;
  }
  ro.solve.verbose = rf.verbose;
  return ro;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sum-of-squares program builder and benchmark harness"};
  app.require_subcommand(1);

  auto* glb = app.add_subcommand("glb", "greatest lower bound of a quartic over a box");
  long long glb_degree = 2;
  double glb_box = 12.0;
  RunFlags glb_rf;
  glb->add_option("--degree", glb_degree, "multiplier monomial degree (even, >= 2)")->required();
  glb->add_option("--box", glb_box, "box half-width")->capture_default_str();
  add_run_flags(glb, glb_rf);

  auto* robust = app.add_subcommand("robust", "robust stability of x' = A(p)x");
  long long robust_n = 2;
  RunFlags robust_rf;
  robust->add_option("--n", robust_n, "state dimension")->required();
  add_run_flags(robust, robust_rf);

  auto* localstab = app.add_subcommand("localstab", "local stability of a Van der Pol chain");
  long long localstab_n = 1;
  RunFlags localstab_rf;
  localstab->add_option("--n", localstab_n, "number of oscillators")->required();
  add_run_flags(localstab, localstab_rf);

  auto* bench = app.add_subcommand("bench", "representation scaling benchmarks");
  std::string bench_op;
  std::vector<long long> bench_qs;
  long long bench_reps = 5;
  std::string bench_csv_path;
  bool bench_no_audit = false;
  bench->add_option("--op", bench_op, "add|mul|diff|subs|int")->required();
  bench->add_option("--q", bench_qs, "ascending decision-variable counts")
      ->required()
      ->delimiter(',');
  bench->add_option("--reps", bench_reps, "repetitions per timing (minimum 5)")
      ->capture_default_str();
  bench->add_option("--csv", bench_csv_path, "also write the CSV to PATH");
  bench->add_flag("--no-audit", bench_no_audit, "skip dpvar/pvar cross-evaluation checks");

  auto* parse = app.add_subcommand("parse", "parse a polynomial expression, echo canonical form");
  std::string parse_expr;
  parse->add_option("expr", parse_expr, "expression, e.g. \"x1^2 + 2*x1 + 1\"")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (glb->parsed()) {
      auto rep = sosforge::run_glb(glb_degree, to_run_options(glb_rf), glb_box);
      std::fputs(sosforge::format_report(rep).c_str(), stdout);
    } else if (robust->parsed()) {
      auto rep = sosforge::run_robust(robust_n, to_run_options(robust_rf));
      std::fputs(sosforge::format_report(rep).c_str(), stdout);
    } else if (localstab->parsed()) {
      auto rep = sosforge::run_localstab(localstab_n, to_run_options(localstab_rf));
      std::fputs(sosforge::format_report(rep).c_str(), stdout);
    } else if (bench->parsed()) {
      sosforge::BenchOptions bo;
      bo.qs.assign(bench_qs.begin(), bench_qs.end());
      bo.reps = bench_reps;
      bo.audit = !bench_no_audit;
      auto recs = sosforge::run_bench(bench_op, bo);
      const std::string csv = sosforge::bench_csv(recs);
      std::fputs(csv.c_str(), stdout);
      if (!bench_csv_path.empty()) sosforge::write_bench_csv(bench_csv_path, recs);
    } else if (parse->parsed()) {
      sosforge::PPoly p = sosforge::parse_ppoly(parse_expr);
      std::fprintf(stdout, "%s\n", sosforge::entry_text(p).c_str());
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
