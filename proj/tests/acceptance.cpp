// Acceptance gate: nine end-to-end criteria, one [PASS]/[FAIL] line each.
// A criterion passes only if every check holds AND it finishes inside its
// wall-clock budget. Exit status is nonzero when any criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sosforge/bench.hpp"
#include "sosforge/dpoly.hpp"
#include "sosforge/errors.hpp"
#include "sosforge/flat.hpp"
#include "sosforge/monomial.hpp"
#include "sosforge/poly_parse.hpp"
#include "sosforge/problems.hpp"
#include "sosforge/sdpa_io.hpp"
#include "sosforge/solver.hpp"
#include "sosforge/sosprog.hpp"

using namespace sosforge;
using testaux::Rng;

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Checker {
  Index total = 0;
  std::vector<std::string> failures;
  void fail(const std::string& m) {
    ++total;
    if (failures.size() < 12) failures.push_back(m);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::string> numbered_names(const std::string& stem, Index count) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    std::string id = std::to_string(i + 1);
    out.push_back(stem + std::string(6 - std::min<std::size_t>(6, id.size()), '0') + id);
  }
  return out;
}

// Dense random scalar polynomial over the full basis of the given variables.
PPoly dense_ppoly(const VarSet& vars, Degree deg, Rng& rng) {
  PPoly p;
  p.ivars = vars;
  p.basis = full_basis(vars, deg);
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index j = 0; j < p.basis.nmon(); ++j) {
    const double v = rng.unif(-1.0, 1.0);
    if (v == 0.0) continue;
    ti.push_back(0);
    tj.push_back(j);
    tv.push_back(v);
  }
  p.coeff = from_triplets(ti, tj, tv, 1, p.basis.nmon());
  return p;
}

// The synthetic scaling instance: scalar variable over the degree-4 full
// basis in two independent variables with a dense random coefficient matrix.
DPoly scaling_instance(const std::vector<std::string>& dnames, std::mt19937_64& g) {
  DPoly s;
  s.dvars = make_varset(dnames);
  s.ivars = make_varset({"x1", "x2"});
  s.basis = full_basis(s.ivars, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd C(s.dvars.size() + 1, s.basis.nmon());
  for (Index i = 0; i < C.rows(); ++i)
    for (Index j = 0; j < C.cols(); ++j) C(i, j) = u(g);
  s.coeff = from_dense(C);
  return s;
}

Eigen::MatrixXd to_dense(const SparseMat<double>& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows, a.cols);
  for (Index j = 0; j < a.cols; ++j)
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) m(a.rowidx[k], j) = a.vals[k];
  return m;
}

void check_trace_duality(Checker& ck, const Solution& sol, const char* what) {
  for (const IterStat& it : sol.trace)
    if (!(it.obj_dual <= it.obj_primal + 1e-6)) {
      std::ostringstream os;
      os << what << ": dual " << it.obj_dual << " above primal " << it.obj_primal;
      ck.fail(os.str());
      return;
    }
}

// --- criterion 1 -------------------------------------------------------------

void crit_basis_combinatorics(Checker& ck) {
  std::vector<std::string> pool;
  for (int i = 1; i <= 8; ++i) pool.push_back("x" + std::to_string(i));
  for (Index p = 1; p <= 8; ++p) {
    const VarSet vars =
        make_varset(std::vector<std::string>(pool.begin(), pool.begin() + p));
    for (Degree d = 1; d <= 8; ++d) {
      const DegreeMatrix z = full_basis(vars, d);
      const auto want_rows = static_cast<Index>(binom(static_cast<std::uint64_t>(p + d), d));
      // p*n - p*binom(p+d-1, p-1) zero entries removed: [p - p^2/(p+d)] * n
      const auto want_nnz = static_cast<Index>(
          static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(want_rows) -
          static_cast<std::uint64_t>(p) *
              binom(static_cast<std::uint64_t>(p + d - 1), static_cast<std::uint64_t>(p - 1)));
      if (z.nmon() != want_rows || z.degs.nnz() != want_nnz) {
        std::ostringstream os;
        os << "p=" << p << " d=" << d << ": rows " << z.nmon() << " (want " << want_rows
           << "), nnz " << z.degs.nnz() << " (want " << want_nnz << ")";
        ck.fail(os.str());
      }
    }
  }

  // pinned degree matrix for two variables at degree two
  const DegreeMatrix z22 = full_basis(make_varset({"x1", "x2"}), 2);
  const std::vector<std::vector<Degree>> want = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
  if (z22.vars.names != std::vector<std::string>{"x1", "x2"} || testaux::dense_rows(z22) != want)
    ck.fail("degree-2 basis in two variables differs from the pinned matrix");
}

// --- criterion 2 -------------------------------------------------------------

void crit_oracle_equivalence(Checker& ck) {
  const Index kInstances = 500;
  const int kPoints = 20;
  Rng rng(2026);

  auto report = [&ck](const char* op, Index bad) {
    if (bad) {
      std::ostringstream os;
      os << op << ": " << bad << " oracle mismatches";
      ck.fail(os.str());
    }
  };

  auto max_abs_err = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
  };

  {  // add
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      o.m1 = rng.range(1, 2);
      o.m2 = rng.range(1, 2);
      const DPoly a = testaux::random_dpoly(o, rng);
      const DPoly b = testaux::random_dpoly(o, rng);
      const DPoly r = add(a, b);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point({&a.dvars, &a.ivars, &b.dvars, &b.ivars}, rng);
        if (max_abs_err(testaux::ref_eval(r, pt),
                        testaux::ref_eval(a, pt) + testaux::ref_eval(b, pt)) > 1e-12)
          ++bad;
      }
    }
    report("add", bad);
  }

  {  // mul_poly, both sides, matrix shapes and scalar broadcast
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      o.m1 = rng.range(1, 2);
      o.m2 = rng.range(1, 2);
      const DPoly s = testaux::random_dpoly(o, rng);
      const Side side = rng.chance(0.5) ? Side::Right : Side::Left;
      const bool broadcast = rng.chance(0.4);
      Index pm1 = 1, pm2 = 1;
      if (!broadcast) {
        if (side == Side::Right) {
          pm1 = s.m2;
          pm2 = rng.range(1, 2);
        } else {
          pm1 = rng.range(1, 2);
          pm2 = s.m1;
        }
      }
      const PPoly p = testaux::random_ppoly(pm1, pm2, 4, 6, 8, 1.0, rng);
      const DPoly r = mul_poly(s, p, side);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point({&s.dvars, &s.ivars, &p.ivars}, rng);
        const Eigen::MatrixXd sv = testaux::ref_eval(s, pt);
        const Eigen::MatrixXd pv = testaux::ref_eval(p, pt);
        Eigen::MatrixXd want;
        if (broadcast)
          want = sv * pv(0, 0);
        else if (side == Side::Right)
          want = sv * pv;
        else
          want = pv * sv;
        if (max_abs_err(testaux::ref_eval(r, pt), want) > 1e-12) ++bad;
      }
    }
    report("mul_poly", bad);
  }

  {  // subs
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      const DPoly s = testaux::random_dpoly(o, rng);
      const std::string v =
          rng.chance(0.9) ? s.ivars.names[static_cast<std::size_t>(rng.upto(s.ivars.size() - 1))]
                          : std::string("x9");
      const PPoly rp = testaux::random_ppoly(1, 1, 2, 2, 3, 1.0, rng);
      const DPoly r = subs(s, v, rp);
      for (int k = 0; k < kPoints; ++k) {
        PointMap pt = testaux::random_point({&s.dvars, &s.ivars, &rp.ivars}, rng);
        PointMap inner = pt;
        inner[v] = testaux::ref_eval(rp, pt)(0, 0);
        if (max_abs_err(testaux::ref_eval(r, pt), testaux::ref_eval(s, inner)) > 1e-9) ++bad;
      }
    }
    report("subs", bad);
  }

  {  // hcat / vcat
    Index bad_h = 0, bad_v = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions oa, ob;
      oa.m1 = ob.m1 = rng.range(1, 3);
      oa.m2 = rng.range(1, 3);
      ob.m2 = rng.range(1, 3);
      const DPoly a = testaux::random_dpoly(oa, rng);
      const DPoly b = testaux::random_dpoly(ob, rng);
      const DPoly h = hcat(a, b);
      // vcat wants matching column counts; reuse a with a row-compatible b
      testaux::DPolyOptions oc;
      oc.m1 = rng.range(1, 3);
      oc.m2 = oa.m2;
      const DPoly c = testaux::random_dpoly(oc, rng);
      const DPoly v = vcat(a, c);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point(
            {&a.dvars, &a.ivars, &b.dvars, &b.ivars, &c.dvars, &c.ivars}, rng);
        Eigen::MatrixXd wanth(a.m1, a.m2 + b.m2);
        wanth << testaux::ref_eval(a, pt), testaux::ref_eval(b, pt);
        if (max_abs_err(testaux::ref_eval(h, pt), wanth) > 1e-12) ++bad_h;
        Eigen::MatrixXd wantv(a.m1 + c.m1, a.m2);
        wantv << testaux::ref_eval(a, pt), testaux::ref_eval(c, pt);
        if (max_abs_err(testaux::ref_eval(v, pt), wantv) > 1e-12) ++bad_v;
      }
    }
    report("hcat", bad_h);
    report("vcat", bad_v);
  }

  {  // transpose
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      o.m1 = rng.range(1, 3);
      o.m2 = rng.range(1, 3);
      const DPoly s = testaux::random_dpoly(o, rng);
      const DPoly r = transpose(s);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point({&s.dvars, &s.ivars}, rng);
        if (max_abs_err(testaux::ref_eval(r, pt), testaux::ref_eval(s, pt).transpose()) > 1e-12)
          ++bad;
      }
    }
    report("transpose", bad);
  }

  {  // compress
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      o.density = 0.15;  // leave unused monomials and decision variables behind
      const DPoly s = testaux::random_dpoly(o, rng);
      const DPoly r = compress(s);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point({&s.dvars, &s.ivars}, rng);
        if (max_abs_err(testaux::ref_eval(r, pt), testaux::ref_eval(s, pt)) > 1e-12) ++bad;
      }
    }
    report("compress", bad);
  }

  {  // flatten
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      const DPoly s = testaux::random_dpoly(o, rng);
      const FlatPoly f = flatten(s);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point({&s.dvars, &s.ivars}, rng);
        if (max_abs_err(testaux::ref_eval(f, pt), testaux::ref_eval(s, pt)) > 1e-12) ++bad;
      }
    }
    report("flatten", bad);
  }

  {  // diff against central differences
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      const DPoly s = testaux::random_dpoly(o, rng);
      const std::string v = s.ivars.names[static_cast<std::size_t>(rng.upto(s.ivars.size() - 1))];
      const DPoly r = diff(s, v);
      for (int k = 0; k < kPoints; ++k) {
        const PointMap pt = testaux::random_point({&s.dvars, &s.ivars}, rng);
        const Eigen::MatrixXd got = testaux::ref_eval(r, pt);
        const Eigen::MatrixXd fd = testaux::fd_diff(s, v, pt, 1e-5);
        const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
        if ((got - fd).cwiseAbs().maxCoeff() > 1e-6 * scale) ++bad;
      }
    }
    report("diff", bad);
  }

  {  // definite integration against adaptive quadrature
    Index bad = 0;
    for (Index t = 0; t < kInstances; ++t) {
      testaux::DPolyOptions o;
      const DPoly s = testaux::random_dpoly(o, rng);
      const std::string v = s.ivars.names[static_cast<std::size_t>(rng.upto(s.ivars.size() - 1))];
      double lo = rng.unif(-1.0, 1.0), hi = rng.unif(-1.0, 1.0);
      if (lo > hi) std::swap(lo, hi);
      const DPoly r = integrate_def(s, v, lo, hi);
      for (int k = 0; k < kPoints; ++k) {
        PointMap pt = testaux::random_point({&s.dvars, &s.ivars}, rng);
        const double got = testaux::ref_eval(r, pt)(0, 0);
        const double want = testaux::adaptive_simpson(
            [&](double x) {
              PointMap q = pt;
              q[v] = x;
              return testaux::ref_eval(s, q)(0, 0);
            },
            lo, hi);
        if (std::abs(got - want) > 1e-8 * (1.0 + std::abs(want))) ++bad;
      }
    }
    report("integrate_def", bad);
  }
}

// --- criterion 3 -------------------------------------------------------------

void crit_flat_accounting(Checker& ck) {
  const VarSet xs = make_varset({"x1", "x2"});
  for (Degree d : {Degree(2), Degree(4)}) {
    const DegreeMatrix z = full_basis(xs, d);
    const Index n1 = z.nmon();
    const Index zn = z.degs.nnz();
    for (Index q : {Index(1), Index(10), Index(100), Index(1000)}) {
      DPoly s;
      s.dvars = make_varset(numbered_names("a", q));
      s.ivars = xs;
      s.basis = z;
      s.coeff = from_triplets<double>({0}, {0}, {1.0}, q + 1, n1);
      const FlatPoly f = flatten(s);
      const Index want_rows = (q + 1) * n1;
      const Index want_nnz = (q + 1) * zn + q * n1;
      if (f.basis.nmon() != want_rows || f.basis.degs.nnz() != want_nnz) {
        std::ostringstream os;
        os << "d=" << d << " q=" << q << ": rows " << f.basis.nmon() << " (want " << want_rows
           << "), nnz " << f.basis.degs.nnz() << " (want " << want_nnz << ")";
        ck.fail(os.str());
      }
    }
  }
}

// --- criterion 4 -------------------------------------------------------------

void crit_scaling_trends(Checker& ck) {
  // time growth of basis-only operations tracks coefficient count growth
  for (const char* op : {"diff", "subs", "int"}) {
    BenchOptions bo;
    bo.qs = {100, 10000};
    bo.reps = 5;
    bo.seed = 2026;
    bo.audit = false;
    std::vector<BenchRecord> recs = run_bench(op, bo);
    std::vector<BenchRecord> dp;
    for (const BenchRecord& r : recs)
      if (r.representation == "dpvar") dp.push_back(r);
    if (dp.size() != 2) {
      ck.fail(std::string(op) + ": expected two coupled-representation records");
      continue;
    }
    const double tratio = dp[1].wall_time / dp[0].wall_time;
    const double nratio =
        static_cast<double>(dp[1].peak_nnz) / static_cast<double>(dp[0].peak_nnz);
    if (!(tratio <= 3.0 * nratio)) {
      std::ostringstream os;
      os << op << ": time ratio " << tratio << " exceeds 3x coefficient ratio " << nratio;
      ck.fail(os.str());
    }
  }

  {  // addition at twenty thousand decision variables stays fast
    std::mt19937_64 g(2026);
    const Index q = 20000;
    const DPoly s1 = scaling_instance(numbered_names("w", q), g);
    std::vector<std::string> dn;
    for (Index i = q / 2; i < q; ++i) dn.push_back(s1.dvars.names[static_cast<std::size_t>(i)]);
    std::vector<std::string> fresh = numbered_names("v", q / 2);
    dn.insert(dn.end(), fresh.begin(), fresh.end());
    const DPoly s2 = scaling_instance(dn, g);
    auto t0 = Clock::now();
    const DPoly r = add(s1, s2);
    const double dt = secs(t0);
    if (r.q() != q + q / 2) ck.fail("large addition produced the wrong variable count");
    if (!(dt < 5.0)) {
      std::ostringstream os;
      os << "addition with q=20000 took " << dt << " s (limit 5 s)";
      ck.fail(os.str());
    }
  }

  {  // flat basis rows grow with q, coupled rows do not
    BenchOptions bo;
    bo.qs = {0, 2, 4, 8};
    bo.reps = 5;
    bo.seed = 2026;
    bo.audit = true;
    std::vector<BenchRecord> recs = run_bench("add", bo);
    for (const BenchRecord& r : recs) {
      const Index want =
          r.representation == "dpvar" ? Index(15) : (3 * r.q / 2 + 1) * 15;
      if (r.basis_rows != want) {
        std::ostringstream os;
        os << r.representation << " add at q=" << r.q << ": basis rows " << r.basis_rows
           << " (want " << want << ")";
        ck.fail(os.str());
      }
    }
  }
}

// --- criterion 5 -------------------------------------------------------------

void crit_extraction_soundness(Checker& ck) {
  Rng rng(2027);
  const VarSet xs = make_varset({"x1", "x2"});
  Index bad_resid = 0, bad_eval = 0;

  for (Index t = 0; t < 100; ++t) {
    SosProgram prog;
    declare_ivars(prog, {"x1", "x2"});
    DPoly D = dpoly_zero(1, 1);
    const Index parts = rng.range(1, 3);
    for (Index k = 0; k < parts; ++k) {
      const Index kind = rng.range(0, 2);
      DPoly piece;
      if (kind == 0)
        piece = declare_decvar(prog, "g" + std::to_string(t) + "_" + std::to_string(k));
      else if (kind == 1)
        piece = sosvar(prog, full_basis(xs, 1));
      else
        piece = polymatrixvar(prog, testaux::random_basis(xs, 2, 3, rng), 1, 1);
      D = add(D, mul_poly(piece, dense_ppoly(xs, static_cast<Degree>(rng.range(0, 2)), rng),
                          Side::Right));
    }
    D = add(D, from_ppoly(dense_ppoly(xs, 2, rng)));

    std::map<std::string, double> xi0;
    for (const DecVarInfo& info : prog.registry) xi0[info.name] = rng.unif(-1.0, 1.0);
    const DPoly E = add(D, from_ppoly(ppoly_scale(testaux::fix_dvars(D, xi0), -1.0)));
    eq_constraint(prog, E);

    const SdpProblem sdp = assemble(prog);
    const Eigen::MatrixXd A = to_dense(sdp.A);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const Eigen::VectorXd xi = svd.solve(sdp.b);
    if ((A * xi - sdp.b).cwiseAbs().maxCoeff() > 1e-9) {
      ++bad_resid;
      continue;
    }

    // also exercise a different solution of the same underdetermined system
    Eigen::VectorXd xi2 = xi;
    const Eigen::MatrixXd& V = svd.matrixV();
    for (Index j = svd.rank(); j < V.cols() && j < svd.rank() + 3; ++j)
      xi2 += rng.unif(-0.5, 0.5) * V.col(j);

    const std::vector<const Eigen::VectorXd*> candidates = {&xi, &xi2};
    for (const Eigen::VectorXd* sol : candidates) {
      const std::map<std::string, double> vals = testaux::dvar_values(prog, sdp, *sol);
      for (int k = 0; k < 10; ++k) {
        PointMap pt = testaux::random_point({&xs}, rng);
        pt.insert(vals.begin(), vals.end());
        for (const DPoly& eq : prog.equalities)
          if (testaux::ref_eval(eq, pt).cwiseAbs().maxCoeff() > 1e-9) ++bad_eval;
      }
    }
  }
  if (bad_resid) {
    std::ostringstream os;
    os << bad_resid << " generated systems were inconsistent";
    ck.fail(os.str());
  }
  if (bad_eval) {
    std::ostringstream os;
    os << bad_eval << " equality evaluations missed zero";
    ck.fail(os.str());
  }

  {  // hand certificate: x1^2 + 2 x1 + 1 = (x1 + 1)^2 exactly
    SosProgram prog;
    declare_ivars(prog, {"x1"});
    const DPoly s = sosvar(prog, full_basis(make_varset({"x1"}), 1));
    eq_constraint(prog,
                  add(from_ppoly(parse_ppoly("x1^2 + 2*x1 + 1")), scale(s, -1.0)));
    const SdpProblem sdp = assemble(prog);
    Eigen::VectorXd xi = Eigen::VectorXd::Ones(sdp.nvec());  // Gram matrix of all ones
    const Eigen::MatrixXd A = to_dense(sdp.A);
    const Eigen::VectorXd lhs = A * xi;
    bool exact = lhs.size() == sdp.b.size();
    for (Index i = 0; exact && i < lhs.size(); ++i) exact = lhs[i] == sdp.b[i];
    if (!exact) ck.fail("hand certificate does not satisfy the assembled system exactly");
  }
}

// --- criterion 6 -------------------------------------------------------------

void crit_quadvar_layout(Checker& ck) {
  Rng rng(2028);
  const VarSet xs = make_varset({"x1", "x2"});

  for (Index t = 0; t < 20; ++t) {
    const Index ncells = rng.range(1, 3);
    std::vector<DegreeMatrix> Z1;
    std::vector<Index> mdims;
    for (Index i = 0; i < ncells; ++i) {
      Z1.push_back(testaux::random_basis(xs, 2, 3, rng));
      mdims.push_back(rng.range(1, 2));
    }

    SosProgram prog;
    declare_ivars(prog, {"x1", "x2"});
    const auto cells = quadvar(prog, Z1, Z1, mdims, mdims, QuadOption::Pos);

    Index side = 0;
    std::vector<Index> off(static_cast<std::size_t>(ncells) + 1, 0);
    for (Index i = 0; i < ncells; ++i) {
      side += mdims[static_cast<std::size_t>(i)] * Z1[static_cast<std::size_t>(i)].nmon();
      off[static_cast<std::size_t>(i) + 1] = side;
    }

    if (prog.psd_sides != std::vector<Index>{side}) {
      ck.fail("composite block side differs from the dimension sum");
      continue;
    }
    if (static_cast<Index>(prog.registry.size()) != side * (side + 1) / 2) {
      ck.fail("registered variable count is not one per upper-triangle slot");
      continue;
    }

    // registration order walks the upper triangle column-major
    std::map<std::pair<Index, Index>, std::string> slot;
    bool order_ok = true;
    std::size_t k = 0;
    for (Index c = 0; c < side && order_ok; ++c)
      for (Index r = 0; r <= c && order_ok; ++r, ++k) {
        const DecVarInfo& info = prog.registry[k];
        order_ok = info.block == 0 && info.r == r && info.c == c;
        slot[{r, c}] = info.name;
      }
    if (!order_ok) {
      ck.fail("registration order is not the column-major upper triangle");
      continue;
    }

    // every cell (i,j) touches exactly the slots of its offset rectangle
    for (Index i = 0; i < ncells; ++i)
      for (Index j = i; j < ncells; ++j) {
        std::set<std::string> want;
        for (Index r = off[static_cast<std::size_t>(i)]; r < off[static_cast<std::size_t>(i) + 1];
             ++r)
          for (Index c = off[static_cast<std::size_t>(j)];
               c < off[static_cast<std::size_t>(j) + 1]; ++c)
            want.insert(slot.at({std::min(r, c), std::max(r, c)}));

        for (const DPoly* d :
             {&cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
              &cells[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]}) {
          std::set<std::string> used;
          const Index qq = d->q() + 1;
          for (Index cc = 0; cc < d->coeff.cols; ++cc)
            for (Index kk = d->coeff.colptr[cc]; kk < d->coeff.colptr[cc + 1]; ++kk) {
              const Index l = d->coeff.rowidx[kk] % qq;
              if (l > 0) used.insert(d->dvars.names[static_cast<std::size_t>(l - 1)]);
            }
          if (used != want) {
            std::ostringstream os;
            os << "cell (" << i << "," << j << ") touches " << used.size()
               << " variables, rectangle holds " << want.size();
            ck.fail(os.str());
          }
        }
      }
  }
}

// --- criterion 7 -------------------------------------------------------------

void crit_glb_end_to_end(Checker& ck) {
  const double truth = testaux::quartic_box_min(12.0);
  const ProblemReport r2 = run_glb(2);
  const ProblemReport r4 = run_glb(4);
  if (!r2.solved || r2.status != SolveStatus::Optimal) {
    ck.fail("degree-2 relaxation did not solve to optimality");
    return;
  }
  if (!r4.solved || r4.status != SolveStatus::Optimal) {
    ck.fail("degree-4 relaxation did not solve to optimality");
    return;
  }
  if (!(r2.objective <= truth + 1e-6)) {
    std::ostringstream os;
    os << "degree-2 bound " << r2.objective << " exceeds the reference minimum " << truth;
    ck.fail(os.str());
  }
  if (!(r4.objective <= truth + 1e-6)) {
    std::ostringstream os;
    os << "degree-4 bound " << r4.objective << " exceeds the reference minimum " << truth;
    ck.fail(os.str());
  }
  if (!(r4.objective >= r2.objective - 1e-6))
    ck.fail("the degree-4 bound fell below the degree-2 bound");
}

// --- criterion 8 -------------------------------------------------------------

void crit_sdpa_golden(Checker& ck) {
  const std::string dir = SOSFORGE_GOLDEN_DIR;

  if (sdpa_text(assemble(SosProgram{})) != slurp(dir + "/empty.dat-s"))
    ck.fail("empty problem export differs from the golden bytes");

  {
    SosProgram prog;
    DPoly g = declare_decvar(prog, "gamma");
    eq_constraint(prog, add(g, from_ppoly(ppoly_constant(-1.0))));
    set_objective(prog, {{"gamma", 1.0}}, true);
    if (sdpa_text(assemble(prog)) != slurp(dir + "/pinned_scalar.dat-s"))
      ck.fail("pinned scalar export differs from the golden bytes");
  }

  {
    const SdpProblem sdp = assemble(build_glb(2));
    const Solution direct = solve_small(sdp);
    const std::string path = "acceptance_glb2.dat-s";
    export_sdpa(sdp, path);
    const Solution again = solve_small(parse_sdpa(path));
    std::remove(path.c_str());
    if (direct.status != SolveStatus::Optimal || again.status != SolveStatus::Optimal)
      ck.fail("export round trip lost optimality");
    else if (std::abs(direct.obj_primal - again.obj_primal) > 1e-6) {
      std::ostringstream os;
      os << "round-trip optimum moved by " << std::abs(direct.obj_primal - again.obj_primal);
      ck.fail(os.str());
    }
  }
}

// --- criterion 9 -------------------------------------------------------------

void crit_solver_sanity(Checker& ck) {
  {  // max gamma subject to gamma + s = 5, s conic
    SosProgram prog;
    DPoly g = declare_decvar(prog, "gamma");
    DPoly s = sosvar(prog, constant_basis());
    eq_constraint(prog, add(add(g, s), from_ppoly(ppoly_constant(-5.0))));
    set_objective(prog, {{"gamma", 1.0}}, true);
    const Solution sol = solve_small(assemble(prog));
    if (sol.status != SolveStatus::Optimal || std::abs(-sol.obj_primal - 5.0) > 1e-6)
      ck.fail("capped maximization missed the analytic optimum 5");
    check_trace_duality(ck, sol, "capped maximization");
  }

  {  // min tr X with X11 pinned to one
    SdpProblem sdp;
    sdp.blocks = {2};
    sdp.A = from_triplets<double>({0}, {0}, {1.0}, 1, 4);
    sdp.b = Eigen::VectorXd::Constant(1, 1.0);
    sdp.c = Eigen::VectorXd::Zero(4);
    sdp.c[0] = 1.0;
    sdp.c[3] = 1.0;
    const Solution sol = solve_small(sdp);
    if (sol.status != SolveStatus::Optimal || std::abs(sol.obj_primal - 1.0) > 1e-6)
      ck.fail("pinned-corner trace minimization missed the analytic optimum 1");
    check_trace_duality(ck, sol, "trace minimization");
  }

  {  // a negative constant has no sum-of-squares certificate
    SosProgram prog;
    sos_ineq(prog, from_ppoly(ppoly_constant(-1.0)));
    const Solution sol = solve_small(assemble(prog));
    if (sol.status == SolveStatus::Optimal)
      ck.fail("negative-constant program was reported optimal");
    // no duality check: on infeasible instances the deflated dual value
    // diverges upward as the infeasibility certificate
  }
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* label;
    double budget;
    std::function<void(Checker&)> fn;
  };
  const std::vector<Row> rows = {
      {1, "monomial basis counts and the pinned degree-2 basis", 1.0, crit_basis_combinatorics},
      {2, "randomized operations against dense oracles", 60.0, crit_oracle_equivalence},
      {3, "flattened basis accounting laws", 5.0, crit_flat_accounting},
      {4, "scaling trends across representations", 120.0, crit_scaling_trends},
      {5, "solution extraction soundness", 30.0, crit_extraction_soundness},
      {6, "coupled quadratic-form variable layout", 5.0, crit_quadvar_layout},
      {7, "quartic lower bound end to end", 120.0, crit_glb_end_to_end},
      {8, "SDPA golden files and export round trip", 10.0, crit_sdpa_golden},
      {9, "solver sanity on analytic optima", 10.0, crit_solver_sanity},
  };

  int failed = 0;
  for (const Row& row : rows) {
    Checker ck;
    const auto t0 = Clock::now();
    try {
      row.fn(ck);
    } catch (const std::exception& e) {
      ck.fail(std::string("exception: ") + e.what());
    }
    const double dt = secs(t0);
    const bool in_budget = dt < row.budget;
    const bool pass = ck.failures.empty() && in_budget;
    std::printf("[%s] %d/9 %s (%.2fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", row.id, row.label,
                dt, row.budget);
    if (!in_budget) std::printf("       over the time budget\n");
    for (const std::string& f : ck.failures) std::printf("       %s\n", f.c_str());
    if (ck.total > static_cast<Index>(ck.failures.size()))
      std::printf("       ... %lld further failures\n",
                  static_cast<long long>(ck.total - static_cast<Index>(ck.failures.size())));
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
