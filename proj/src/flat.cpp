#include "sosforge/flat.hpp"

#include <algorithm>

namespace sosforge {

namespace {

// A FlatPoly is structurally a DPoly with zero decision variables over the
// joint basis, so the polynomial algebra is shared with the dense-in-rows
// representation and only the variable tagging lives here.
DPoly as_dpoly(const FlatPoly& f) {
  DPoly s;
  s.m1 = f.m1;
  s.m2 = f.m2;
  s.ivars = f.vars;
  s.basis = f.basis;
  s.coeff = f.coeff;
  return s;
}

FlatPoly retag(const DPoly& s, const FlatPoly& a, const FlatPoly* b) {
  FlatPoly out;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.vars = s.ivars;
  out.basis = s.basis;
  out.coeff = s.coeff;
  out.is_dvar.assign(out.vars.names.size(), 0);
  for (std::size_t j = 0; j < out.vars.names.size(); ++j) {
    const std::string& n = out.vars.names[j];
    Index ia = var_index(a.vars, n);
    Index ib = b ? var_index(b->vars, n) : -1;
    std::uint8_t ta = ia >= 0 ? a.is_dvar[static_cast<std::size_t>(ia)] : 0;
    std::uint8_t tb = ib >= 0 ? b->is_dvar[static_cast<std::size_t>(ib)] : 0;
    if (ia >= 0 && ib >= 0 && ta != tb)
      throw ArgumentError("flat op: variable tagged inconsistently: " + n);
    out.is_dvar[j] = ia >= 0 ? ta : tb;
  }
  return out;
}

}  // namespace

void check_valid(const FlatPoly& f) {
  if (f.is_dvar.size() != f.vars.names.size())
    throw DimensionError("FlatPoly: tag vector length mismatch");
  check_valid(as_dpoly(f));
  // Affine in decision variables: every monomial has total dvar degree <= 1.
  std::vector<Degree> ddeg(static_cast<std::size_t>(f.nmon()), 0);
  for (Index j = 0; j < f.basis.degs.cols; ++j) {
    if (!f.is_dvar[static_cast<std::size_t>(j)]) continue;
    for (Index k = f.basis.degs.colptr[j]; k < f.basis.degs.colptr[j + 1]; ++k)
      ddeg[static_cast<std::size_t>(f.basis.degs.rowidx[k])] += f.basis.degs.vals[k];
  }
  for (Degree d : ddeg)
    if (d > 1) throw NonlinearityError("FlatPoly: monomial quadratic in decision variables");
}

FlatPoly flatten(const DPoly& s) {
  for (const auto& d : s.dvars.names)
    if (var_index(s.ivars, d) >= 0)
      throw ArgumentError("flatten: name is both decision and independent: " + d);
  MergedVars mv = merge_vars(s.ivars, s.dvars);
  const Index q = s.q(), n = s.nmon(), p = mv.vars.size();

  // Raw joint basis row l*n+k: monomial k with decision variable l-1 attached
  // (l = 0 keeps the plain monomial).
  std::vector<Index> ti, tj;
  std::vector<Degree> tv;
  ti.reserve(static_cast<std::size_t>((q + 1)) * s.basis.degs.vals.size() +
             static_cast<std::size_t>(q * n));
  tj.reserve(ti.capacity());
  tv.reserve(ti.capacity());
  for (Index l = 0; l <= q; ++l) {
    for (Index j = 0; j < s.basis.degs.cols; ++j)
      for (Index t = s.basis.degs.colptr[j]; t < s.basis.degs.colptr[j + 1]; ++t) {
        ti.push_back(l * n + s.basis.degs.rowidx[t]);
        tj.push_back(mv.map_a[static_cast<std::size_t>(j)]);
        tv.push_back(s.basis.degs.vals[t]);
      }
    if (l > 0)
      for (Index k = 0; k < n; ++k) {
        ti.push_back(l * n + k);
        tj.push_back(mv.map_b[static_cast<std::size_t>(l - 1)]);
        tv.push_back(1);
      }
  }
  DegreeMatrix raw{mv.vars, from_triplets(ti, tj, tv, (q + 1) * n, p)};
  Canonicalized c = canonicalize(raw);

  std::vector<Index> colmap(static_cast<std::size_t>(s.m2 * (q + 1) * n));
  const Index nbar = c.basis.nmon();
  for (Index j = 0; j < s.m2; ++j)
    for (Index l = 0; l <= q; ++l)
      for (Index k = 0; k < n; ++k)
        colmap[static_cast<std::size_t>(j * (q + 1) * n + l * n + k)] =
            j * nbar + c.rowmap[static_cast<std::size_t>(l * n + k)];

  // B(i, j*nbar + rowmap(l*n+k)) = C(i*(q+1)+l, j*n+k)
  std::vector<Index> bi, bj;
  std::vector<double> bv;
  bi.reserve(s.coeff.vals.size());
  bj.reserve(s.coeff.vals.size());
  bv.reserve(s.coeff.vals.size());
  for (Index col = 0; col < s.coeff.cols; ++col) {
    const Index j = n == 0 ? 0 : col / n;
    const Index k = n == 0 ? 0 : col % n;
    for (Index t = s.coeff.colptr[col]; t < s.coeff.colptr[col + 1]; ++t) {
      const Index i = s.coeff.rowidx[t] / (q + 1);
      const Index l = s.coeff.rowidx[t] % (q + 1);
      bi.push_back(i);
      bj.push_back(colmap[static_cast<std::size_t>(j * (q + 1) * n + l * n + k)]);
      bv.push_back(s.coeff.vals[t]);
    }
  }

  FlatPoly out;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.vars = mv.vars;
  out.basis = c.basis;
  out.coeff = from_triplets(bi, bj, bv, s.m1, s.m2 * nbar);
  out.is_dvar.assign(out.vars.names.size(), 0);
  for (Index l = 0; l < q; ++l)
    out.is_dvar[static_cast<std::size_t>(mv.map_b[static_cast<std::size_t>(l)])] = 1;
  return out;
}

FlatPoly flat_add(const FlatPoly& a, const FlatPoly& b) {
  return retag(add(as_dpoly(a), as_dpoly(b)), a, &b);
}

FlatPoly flat_mul(const FlatPoly& f, const PPoly& p, Side side) {
  for (const auto& n : p.ivars.names) {
    Index i = var_index(f.vars, n);
    if (i >= 0 && f.is_dvar[static_cast<std::size_t>(i)])
      throw NonlinearityError("flat_mul: factor mentions decision variable " + n);
  }
  return retag(mul_poly(as_dpoly(f), p, side), f, nullptr);
}

FlatPoly flat_diff(const FlatPoly& f, const std::string& v) {
  Index i = var_index(f.vars, v);
  if (i >= 0 && f.is_dvar[static_cast<std::size_t>(i)])
    throw NonlinearityError("flat_diff: " + v + " is a decision variable");
  return retag(diff(as_dpoly(f), v), f, nullptr);
}

Eigen::MatrixXd eval(const FlatPoly& f, const PointMap& pt) { return eval(as_dpoly(f), pt); }

}  // namespace sosforge
