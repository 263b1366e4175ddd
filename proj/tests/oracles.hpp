#pragma once

// Reference implementations the test suites check the library against.
// Everything here evaluates polynomials by walking raw CSC entries and dense
// exponent rows, never through the library's evaluation pipeline, so a defect
// in the production path cannot mask itself. Generators build random but
// structurally valid values directly from the documented representation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sosforge/dpoly.hpp"
#include "sosforge/flat.hpp"
#include "sosforge/sosprog.hpp"

namespace testaux {

using sosforge::Degree;
using sosforge::Index;

// --- dense views -------------------------------------------------------------

inline std::vector<std::vector<Degree>> dense_rows(const sosforge::DegreeMatrix& z) {
  std::vector<std::vector<Degree>> rows(static_cast<std::size_t>(z.degs.rows),
                                        std::vector<Degree>(static_cast<std::size_t>(z.degs.cols), 0));
  for (Index j = 0; j < z.degs.cols; ++j)
    for (Index k = z.degs.colptr[j]; k < z.degs.colptr[j + 1]; ++k)
      rows[static_cast<std::size_t>(z.degs.rowidx[k])][static_cast<std::size_t>(j)] = z.degs.vals[k];
  return rows;
}

inline double mono_value(const std::vector<Degree>& row, const std::vector<double>& xs) {
  double v = 1.0;
  for (std::size_t t = 0; t < row.size(); ++t)
    for (Degree e = 0; e < row[t]; ++e) v *= xs[t];
  return v;
}

inline std::vector<double> var_values(const sosforge::VarSet& vs, const sosforge::PointMap& pt) {
  std::vector<double> out;
  out.reserve(vs.names.size());
  for (const std::string& n : vs.names) out.push_back(pt.at(n));
  return out;
}

// --- reference evaluation ----------------------------------------------------

inline Eigen::MatrixXd ref_eval(const sosforge::DPoly& s, const sosforge::PointMap& pt) {
  const auto rows = dense_rows(s.basis);
  const std::vector<double> xs = var_values(s.basis.vars, pt);
  const std::vector<double> xi = var_values(s.dvars, pt);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s.m1, s.m2);
  const Index qq = s.q() + 1;
  const Index n = s.nmon();
  for (Index c = 0; c < s.coeff.cols; ++c) {
    for (Index k = s.coeff.colptr[c]; k < s.coeff.colptr[c + 1]; ++k) {
      const Index r = s.coeff.rowidx[k];
      double term = s.coeff.vals[k] * mono_value(rows[static_cast<std::size_t>(c % n)], xs);
      const Index l = r % qq;
      if (l > 0) term *= xi[static_cast<std::size_t>(l - 1)];
      m(r / qq, c / n) += term;
    }
  }
  return m;
}

inline Eigen::MatrixXd ref_eval(const sosforge::PPoly& p, const sosforge::PointMap& pt) {
  const auto rows = dense_rows(p.basis);
  const std::vector<double> xs = var_values(p.basis.vars, pt);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p.m1, p.m2);
  const Index n = p.basis.nmon();
  for (Index c = 0; c < p.coeff.cols; ++c)
    for (Index k = p.coeff.colptr[c]; k < p.coeff.colptr[c + 1]; ++k)
      m(p.coeff.rowidx[k], c / n) +=
          p.coeff.vals[k] * mono_value(rows[static_cast<std::size_t>(c % n)], xs);
  return m;
}

inline Eigen::MatrixXd ref_eval(const sosforge::FlatPoly& f, const sosforge::PointMap& pt) {
  const auto rows = dense_rows(f.basis);
  const std::vector<double> xs = var_values(f.basis.vars, pt);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(f.m1, f.m2);
  const Index n = f.basis.nmon();
  for (Index c = 0; c < f.coeff.cols; ++c)
    for (Index k = f.coeff.colptr[c]; k < f.coeff.colptr[c + 1]; ++k)
      m(f.coeff.rowidx[k], c / n) +=
          f.coeff.vals[k] * mono_value(rows[static_cast<std::size_t>(c % n)], xs);
  return m;
}

// --- random instances --------------------------------------------------------

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}

  double unif(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }
  Index upto(Index n) { return std::uniform_int_distribution<Index>(0, n)(g); }  // [0, n]
  Index range(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(g); }
  bool chance(double p) { return unif(0.0, 1.0) < p; }
};

inline std::vector<std::string> subset_names(const std::vector<std::string>& pool, Index count,
                                             Rng& rng) {
  std::vector<std::string> names = pool;
  std::shuffle(names.begin(), names.end(), rng.g);
  names.resize(static_cast<std::size_t>(count));
  return names;
}

// Canonical basis built without the library's canonicalize: rows are sorted
// ascending lexicographically (first column most significant) and deduped by
// a plain comparison sort here.
inline sosforge::DegreeMatrix random_basis(const sosforge::VarSet& vars, Degree maxdeg,
                                           Index maxrows, Rng& rng) {
  const Index p = vars.size();
  std::set<std::vector<Degree>> rowset;
  rowset.insert(std::vector<Degree>(static_cast<std::size_t>(p), 0));  // keep the constant reachable
  const Index want = rng.range(1, maxrows);
  for (Index t = 0; t < 4 * want && static_cast<Index>(rowset.size()) < want; ++t) {
    std::vector<Degree> row(static_cast<std::size_t>(p), 0);
    const Degree total = static_cast<Degree>(rng.upto(maxdeg));
    for (Degree u = 0; u < total; ++u) ++row[static_cast<std::size_t>(rng.upto(p - 1))];
    rowset.insert(row);
  }
  std::vector<std::vector<Degree>> rows(rowset.begin(), rowset.end());
  if (!rng.chance(0.8)) rows.erase(rows.begin());  // sometimes no constant monomial
  if (rows.empty()) rows.push_back(std::vector<Degree>(static_cast<std::size_t>(p), 0));
  // std::set on vectors is exactly ascending lexicographic with the first
  // column most significant, which is the canonical row order.
  std::vector<Index> ti, tj;
  std::vector<Degree> tv;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < p; ++j)
      if (rows[i][static_cast<std::size_t>(j)] != 0) {
        ti.push_back(static_cast<Index>(i));
        tj.push_back(j);
        tv.push_back(rows[i][static_cast<std::size_t>(j)]);
      }
  sosforge::DegreeMatrix z;
  z.vars = vars;
  z.degs = sosforge::from_triplets(ti, tj, tv, static_cast<Index>(rows.size()), p);
  return z;
}

struct DPolyOptions {
  Index m1 = 1;
  Index m2 = 1;
  Index max_p = 4;
  Index max_q = 30;
  Degree max_deg = 6;
  Index max_rows = 10;
  double density = 0.3;
  double coeff_lo = -1.0;
  double coeff_hi = 1.0;
  bool integer_coeffs = false;
};

inline const std::vector<std::string>& ivar_pool() {
  static const std::vector<std::string> pool = {"x1", "x2", "x3", "x4"};
  return pool;
}

inline std::vector<std::string> dvar_pool() {
  std::vector<std::string> pool;
  for (int i = 1; i <= 30; ++i)
    pool.push_back("d" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  return pool;
}

inline sosforge::DPoly random_dpoly(const DPolyOptions& o, Rng& rng) {
  sosforge::DPoly s;
  s.m1 = o.m1;
  s.m2 = o.m2;
  const Index p = rng.range(1, o.max_p);
  const Index q = rng.upto(o.max_q);
  s.ivars = sosforge::make_varset(subset_names(ivar_pool(), p, rng));
  s.dvars = q > 0 ? sosforge::make_varset(subset_names(dvar_pool(), q, rng)) : sosforge::VarSet{};
  s.basis = random_basis(s.ivars, o.max_deg, o.max_rows, rng);
  const Index rows = s.m1 * (q + 1);
  const Index cols = s.m2 * s.basis.nmon();
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (rng.chance(o.density)) {
        double v = o.integer_coeffs ? static_cast<double>(rng.range(-3, 3))
                                    : rng.unif(o.coeff_lo, o.coeff_hi);
        if (v == 0.0) continue;
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(v);
      }
  s.coeff = sosforge::from_triplets(ti, tj, tv, rows, cols);
  sosforge::check_valid(s);
  return s;
}

inline sosforge::PPoly random_ppoly(Index m1, Index m2, Index max_p, Degree max_deg, Index max_rows,
                                    double clim, Rng& rng) {
  sosforge::PPoly p;
  p.m1 = m1;
  p.m2 = m2;
  const Index nv = rng.range(1, max_p);
  p.ivars = sosforge::make_varset(subset_names(ivar_pool(), nv, rng));
  p.basis = random_basis(p.ivars, max_deg, max_rows, rng);
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index i = 0; i < m1; ++i)
    for (Index j = 0; j < m2 * p.basis.nmon(); ++j)
      if (rng.chance(0.5)) {
        const double v = rng.unif(-clim, clim);
        if (v == 0.0) continue;
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(v);
      }
  p.coeff = sosforge::from_triplets(ti, tj, tv, m1, m2 * p.basis.nmon());
  sosforge::check_valid(p);
  return p;
}

// One value for every name either operand could mention.
inline sosforge::PointMap random_point(const std::vector<const sosforge::VarSet*>& sets, Rng& rng,
                                       double lo = -1.0, double hi = 1.0) {
  sosforge::PointMap pt;
  for (const sosforge::VarSet* vs : sets)
    for (const std::string& n : vs->names)
      if (!pt.count(n)) pt[n] = rng.unif(lo, hi);
  return pt;
}

// --- derivative and integral references --------------------------------------

// Central difference of the reference evaluation in one variable.
inline Eigen::MatrixXd fd_diff(const sosforge::DPoly& s, const std::string& v,
                               sosforge::PointMap pt, double h = 1e-4) {
  pt[v] += h;
  const Eigen::MatrixXd hi = ref_eval(s, pt);
  pt[v] -= 2 * h;
  const Eigen::MatrixXd lo = ref_eval(s, pt);
  return (hi - lo) / (2 * h);
}

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                            double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 30);
}

// --- problem-specific references ----------------------------------------------

// Minimum of the quartic benchmark objective over the centered square box,
// from a 49x49 grid start refined by projected gradient descent.
inline double quartic_box_min(double hw) {
  auto f = [](double a, double b) {
    return a * a * a * a + b * b * b * b - 2 * b * a * a * a - 3 * b * b * a * a +
           150.0 * (a * a + b * b);
  };
  auto gx = [](double a, double b) {
    return 4 * a * a * a - 6 * b * a * a - 6 * b * b * a + 300.0 * a;
  };
  auto gy = [](double a, double b) { return 4 * b * b * b - 2 * a * a * a - 6 * b * a * a + 300.0 * b; };
  auto clamp = [&](double t) { return std::min(hw, std::max(-hw, t)); };

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> starts;
  double bestpt[2] = {0, 0};
  for (int i = 0; i < 49; ++i)
    for (int j = 0; j < 49; ++j) {
      const double a = -hw + 2 * hw * i / 48.0, b = -hw + 2 * hw * j / 48.0;
      const double v = f(a, b);
      starts.emplace_back(a, b);
      if (v < best) {
        best = v;
        bestpt[0] = a;
        bestpt[1] = b;
      }
    }
  // descend from the best grid point and the box corners
  starts = {{bestpt[0], bestpt[1]}, {hw, hw}, {-hw, -hw}, {hw, -hw}, {-hw, hw}};
  for (auto [a, b] : starts) {
    double step = 0.5;
    for (int it = 0; it < 600; ++it) {
      const double na = clamp(a - step * gx(a, b));
      const double nb = clamp(b - step * gy(a, b));
      if (f(na, nb) < f(a, b)) {
        a = na;
        b = nb;
        step *= 1.2;
      } else {
        step *= 0.5;
        if (step < 1e-14) break;
      }
    }
    best = std::min(best, f(a, b));
  }
  return best;
}

// --- SDP extraction helpers ---------------------------------------------------

// Decision-variable values carried by a vectorized point that satisfies
// A xi = b. Off-diagonal PSD entries live in two mirrored slots whose
// coefficients each carry half the weight, so the polynomial-level value is
// the average of the pair.
inline std::map<std::string, double> dvar_values(const sosforge::SosProgram& prog,
                                                 const sosforge::SdpProblem& sdp,
                                                 const Eigen::VectorXd& xi) {
  std::vector<Index> base(sdp.blocks.size(), 0);
  Index off = sdp.nfree;
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    base[b] = off;
    off += sdp.blocks[b] * sdp.blocks[b];
  }
  std::map<std::string, double> out;
  for (const sosforge::DecVarInfo& info : prog.registry) {
    if (info.block < 0) {
      out[info.name] = xi[sdp.varmap.at(info.name)];
    } else {
      const Index side = sdp.blocks[static_cast<std::size_t>(info.block)];
      const Index o = base[static_cast<std::size_t>(info.block)];
      const double up = xi[o + info.c * side + info.r];
      const double lo = xi[o + info.r * side + info.c];
      out[info.name] = info.r == info.c ? up : 0.5 * (up + lo);
    }
  }
  return out;
}

// The polynomial in x obtained by pinning every decision variable of s to the
// given values; built by direct row surgery on the coefficient matrix.
inline sosforge::PPoly fix_dvars(const sosforge::DPoly& s, const std::map<std::string, double>& xi) {
  const Index qq = s.q() + 1;
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index c = 0; c < s.coeff.cols; ++c)
    for (Index k = s.coeff.colptr[c]; k < s.coeff.colptr[c + 1]; ++k) {
      const Index r = s.coeff.rowidx[k];
      const Index l = r % qq;
      const double w =
          l == 0 ? 1.0 : xi.at(s.dvars.names[static_cast<std::size_t>(l - 1)]);
      if (w == 0.0) continue;
      ti.push_back(r / qq);
      tj.push_back(c);
      tv.push_back(s.coeff.vals[k] * w);
    }
  sosforge::PPoly out;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.ivars = s.ivars;
  out.basis = s.basis;
  out.coeff = sosforge::from_triplets(ti, tj, tv, s.m1, s.m2 * s.nmon());
  sosforge::check_valid(out);
  return out;
}

}  // namespace testaux
