#include "sosforge/dpoly.hpp"

#include <algorithm>
#include <cmath>

namespace sosforge {

namespace {

double dpow(double x, Degree e) {
  double r = 1.0;
  for (Degree i = 0; i < e; ++i) r *= x;
  return r;
}

// Rebuilds s over a wider decision-variable set and a wider basis.
// dmap (old dvar -> new dvar position) must be strictly increasing and bmap
// (old monomial -> new monomial) injective; both come from merge_vars /
// merge_bases, so the coefficient move is a pure relabel.
DPoly relabel(const DPoly& s, const VarSet& dvars2, const std::vector<Index>& dmap,
              const DegreeMatrix& basis2, const std::vector<Index>& bmap) {
  const Index q1 = s.q(), q2 = dvars2.size();
  const Index n1 = s.nmon(), n2 = basis2.nmon();
  std::vector<Index> rowmap(static_cast<std::size_t>(s.m1 * (q1 + 1)));
  for (Index i = 0; i < s.m1; ++i) {
    rowmap[static_cast<std::size_t>(i * (q1 + 1))] = i * (q2 + 1);
    for (Index l = 0; l < q1; ++l)
      rowmap[static_cast<std::size_t>(i * (q1 + 1) + 1 + l)] =
          i * (q2 + 1) + 1 + dmap[static_cast<std::size_t>(l)];
  }
  std::vector<Index> colmap(static_cast<std::size_t>(s.m2 * n1));
  for (Index j = 0; j < s.m2; ++j)
    for (Index k = 0; k < n1; ++k)
      colmap[static_cast<std::size_t>(j * n1 + k)] = j * n2 + bmap[static_cast<std::size_t>(k)];
  DPoly out;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.dvars = dvars2;
  out.ivars = basis2.vars;
  out.basis = basis2;
  out.coeff = scatter_cols(scatter_rows(s.coeff, rowmap, s.m1 * (q2 + 1)), colmap, s.m2 * n2);
  return out;
}

void require_ivar(const DPoly& s, const std::string& v, const char* op) {
  if (var_index(s.dvars, v) >= 0)
    throw NonlinearityError(std::string(op) + ": " + v + " is a decision variable");
}

// Removes v's basis column when it carries no exponent anywhere.
DPoly drop_var_if_unused(DPoly s, const std::string& v) {
  Index idx = var_index(s.ivars, v);
  if (idx < 0) return s;
  if (s.basis.degs.colptr[idx] != s.basis.degs.colptr[idx + 1]) return s;  // still used
  std::vector<Index> keep;
  std::vector<std::string> names;
  for (Index j = 0; j < s.ivars.size(); ++j)
    if (j != idx) {
      keep.push_back(j);
      names.push_back(s.ivars.names[static_cast<std::size_t>(j)]);
    }
  s.basis.degs = gather_cols(s.basis.degs, keep);
  s.basis.vars = VarSet{std::move(names)};
  s.ivars = s.basis.vars;
  return s;
}

}  // namespace

PPoly ppoly_constant(double v, Index m1, Index m2) {
  if (m1 < 0 || m2 < 0) throw DimensionError("ppoly_constant: negative shape");
  PPoly p;
  p.m1 = m1;
  p.m2 = m2;
  p.basis = constant_basis({});
  p.coeff = SparseMat<double>(m1, m2);
  if (v != 0.0) {
    std::vector<Index> ti, tj;
    std::vector<double> tv;
    for (Index j = 0; j < m2; ++j)
      for (Index i = 0; i < m1; ++i) {
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(v);
      }
    p.coeff = from_triplets(ti, tj, tv, m1, m2);
  }
  return p;
}

PPoly ppoly_var(const std::string& name) {
  PPoly p;
  p.ivars = make_varset({name});
  p.basis.vars = p.ivars;
  p.basis.degs = from_triplets<Degree>({0}, {0}, {1}, 1, 1);
  p.coeff = from_triplets<double>({0}, {0}, {1.0}, 1, 1);
  return p;
}

DPoly dpoly_zero(Index m1, Index m2) {
  if (m1 < 0 || m2 < 0) throw DimensionError("dpoly_zero: negative shape");
  DPoly s;
  s.m1 = m1;
  s.m2 = m2;
  s.basis.degs = SparseMat<Degree>(0, 0);
  s.coeff = SparseMat<double>(m1, 0);
  return s;
}

DPoly from_ppoly(const PPoly& p) {
  DPoly s;
  s.m1 = p.m1;
  s.m2 = p.m2;
  s.ivars = p.ivars;
  s.basis = p.basis;
  s.coeff = p.coeff;  // q = 0, so the layouts coincide
  return s;
}

PPoly to_ppoly(const DPoly& s) {
  if (s.q() != 0) throw ArgumentError("to_ppoly: polynomial has decision variables");
  PPoly p;
  p.m1 = s.m1;
  p.m2 = s.m2;
  p.ivars = s.ivars;
  p.basis = s.basis;
  p.coeff = s.coeff;
  return p;
}

DPoly dpoly_dvar(const std::string& name) {
  DPoly s;
  s.dvars = make_varset({name});
  s.basis = constant_basis({});
  s.coeff = from_triplets<double>({1}, {0}, {1.0}, 2, 1);
  return s;
}

void check_valid(const DPoly& s) {
  if (s.m1 < 0 || s.m2 < 0) throw DimensionError("DPoly: negative shape");
  if (s.coeff.rows != s.m1 * (s.q() + 1) || s.coeff.cols != s.m2 * s.nmon())
    throw DimensionError("DPoly: coefficient shape does not match block layout");
  if (!is_canonical(s.coeff)) throw ArgumentError("DPoly: coefficient matrix not canonical");
  if (!is_canonical(s.basis.degs)) throw ArgumentError("DPoly: degree matrix not canonical");
  if (s.basis.vars != s.ivars) throw ArgumentError("DPoly: basis variable set mismatch");
  if (s.basis.degs.cols != s.ivars.size()) throw DimensionError("DPoly: basis column count");
  if (!std::is_sorted(s.dvars.names.begin(), s.dvars.names.end()))
    throw ArgumentError("DPoly: dvars not sorted");
  if (!std::is_sorted(s.ivars.names.begin(), s.ivars.names.end()))
    throw ArgumentError("DPoly: ivars not sorted");
  for (const auto& d : s.dvars.names)
    if (var_index(s.ivars, d) >= 0)
      throw ArgumentError("DPoly: name is both decision and independent: " + d);
  LexKeys keys = lex_keys(s.basis, max_entry(s.basis));
  for (Index i = 1; i < s.basis.nmon(); ++i)
    if (!keys.less(i - 1, i)) throw ArgumentError("DPoly: basis rows not strictly ascending");
}

void check_valid(const PPoly& p) {
  DPoly s = from_ppoly(p);
  check_valid(s);
}

Eigen::MatrixXd eval(const DPoly& s, const PointMap& pt) {
  const Index q = s.q(), n = s.nmon();
  std::vector<double> dval(static_cast<std::size_t>(q));
  for (Index l = 0; l < q; ++l) {
    auto it = pt.find(s.dvars.names[static_cast<std::size_t>(l)]);
    if (it == pt.end())
      throw ArgumentError("eval: missing value for " + s.dvars.names[static_cast<std::size_t>(l)]);
    dval[static_cast<std::size_t>(l)] = it->second;
  }
  std::vector<double> mon(static_cast<std::size_t>(n), 1.0);
  for (Index j = 0; j < s.ivars.size(); ++j) {
    auto it = pt.find(s.ivars.names[static_cast<std::size_t>(j)]);
    if (it == pt.end())
      throw ArgumentError("eval: missing value for " + s.ivars.names[static_cast<std::size_t>(j)]);
    for (Index k = s.basis.degs.colptr[j]; k < s.basis.degs.colptr[j + 1]; ++k)
      mon[static_cast<std::size_t>(s.basis.degs.rowidx[k])] *= dpow(it->second, s.basis.degs.vals[k]);
  }
  Eigen::MatrixXd out(s.m1, s.m2);
  out.setZero();
  for (Index c = 0; c < s.coeff.cols; ++c) {
    const Index j = n == 0 ? 0 : c / n;
    const Index k = n == 0 ? 0 : c % n;
    for (Index t = s.coeff.colptr[c]; t < s.coeff.colptr[c + 1]; ++t) {
      const Index r = s.coeff.rowidx[t];
      const Index i = r / (q + 1);
      const Index l = r % (q + 1);
      const double f = l == 0 ? 1.0 : dval[static_cast<std::size_t>(l - 1)];
      out(i, j) += s.coeff.vals[t] * f * mon[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

Eigen::MatrixXd eval(const PPoly& p, const PointMap& pt) { return eval(from_ppoly(p), pt); }

DPoly add(const DPoly& a, const DPoly& b) {
  if (a.m1 != b.m1 || a.m2 != b.m2) throw DimensionError("add: shape mismatch");
  MergedVars dv = merge_vars(a.dvars, b.dvars);
  MergedBases mb = merge_bases(a.basis, b.basis);
  DPoly aw = relabel(a, dv.vars, dv.map_a, mb.basis, mb.map_a);
  DPoly bw = relabel(b, dv.vars, dv.map_b, mb.basis, mb.map_b);
  aw.coeff = add(aw.coeff, bw.coeff);
  return aw;
}

DPoly scale(const DPoly& a, double f) {
  DPoly out = a;
  out.coeff = scale(a.coeff, f);
  return out;
}

DPoly mul_poly(const DPoly& s, const PPoly& p, Side side) {
  const bool scalar_p = p.m1 == 1 && p.m2 == 1;
  const bool scalar_s = s.m1 == 1 && s.m2 == 1;
  Index out_m1, out_m2;
  if (scalar_p) {
    out_m1 = s.m1;
    out_m2 = s.m2;
  } else if (scalar_s) {
    out_m1 = p.m1;
    out_m2 = p.m2;
  } else if (side == Side::Right) {
    if (s.m2 != p.m1) throw DimensionError("mul_poly: inner dimensions disagree");
    out_m1 = s.m1;
    out_m2 = p.m2;
  } else {
    if (p.m2 != s.m1) throw DimensionError("mul_poly: inner dimensions disagree");
    out_m1 = p.m1;
    out_m2 = s.m2;
  }

  KronBases kb = kron_bases(s.basis, p.basis);
  const Index q = s.q(), n1 = s.nmon(), n2 = p.basis.nmon(), n3 = kb.basis.nmon();

  std::vector<Index> ti, tj;
  std::vector<double> tv;
  const std::size_t guess =
      std::min<std::size_t>(s.coeff.vals.size() * std::max<std::size_t>(1, p.coeff.vals.size()),
                            std::size_t{1} << 22);
  ti.reserve(guess);
  tj.reserve(guess);
  tv.reserve(guess);

  for (Index cs = 0; cs < s.coeff.cols; ++cs) {
    const Index js = n1 == 0 ? 0 : cs / n1;
    const Index k1 = n1 == 0 ? 0 : cs % n1;
    for (Index ts = s.coeff.colptr[cs]; ts < s.coeff.colptr[cs + 1]; ++ts) {
      const Index rs = s.coeff.rowidx[ts];
      const Index is = rs / (q + 1);
      const Index l = rs % (q + 1);
      const double v = s.coeff.vals[ts];
      for (Index cp = 0; cp < p.coeff.cols; ++cp) {
        const Index jp = n2 == 0 ? 0 : cp / n2;
        const Index k2 = n2 == 0 ? 0 : cp % n2;
        for (Index tp = p.coeff.colptr[cp]; tp < p.coeff.colptr[cp + 1]; ++tp) {
          const Index ip = p.coeff.rowidx[tp];
          const double w = p.coeff.vals[tp];
          Index oi, oj;  // output block coordinates
          if (scalar_p) {
            oi = is;
            oj = js;
          } else if (scalar_s) {
            oi = ip;
            oj = jp;
          } else if (side == Side::Right) {
            if (ip != js) continue;  // contraction over s columns / p rows
            oi = is;
            oj = jp;
          } else {
            if (jp != is) continue;  // contraction over p columns / s rows
            oi = ip;
            oj = js;
          }
          ti.push_back(oi * (q + 1) + l);
          tj.push_back(oj * n3 + kb.prodmap[static_cast<std::size_t>(k1 * n2 + k2)]);
          tv.push_back(v * w);
        }
      }
    }
  }

  DPoly out;
  out.m1 = out_m1;
  out.m2 = out_m2;
  out.dvars = s.dvars;
  out.ivars = kb.basis.vars;
  out.basis = kb.basis;
  out.coeff = from_triplets(ti, tj, tv, out_m1 * (q + 1), out_m2 * n3);
  return out;
}

DPoly diff(const DPoly& s, const std::string& v) {
  require_ivar(s, v, "diff");
  const Index idx = var_index(s.ivars, v);
  if (idx < 0) {
    DPoly z;
    z.m1 = s.m1;
    z.m2 = s.m2;
    z.dvars = s.dvars;
    z.ivars = s.ivars;
    z.basis.vars = s.ivars;
    z.basis.degs = SparseMat<Degree>(0, s.ivars.size());
    z.coeff = SparseMat<double>(s.m1 * (s.q() + 1), 0);
    return z;
  }
  const Index n = s.nmon();
  // Exponent of v per monomial; rows with zero exponent vanish.
  std::vector<Degree> expo(static_cast<std::size_t>(n), 0);
  for (Index k = s.basis.degs.colptr[idx]; k < s.basis.degs.colptr[idx + 1]; ++k)
    expo[static_cast<std::size_t>(s.basis.degs.rowidx[k])] = s.basis.degs.vals[k];
  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  std::vector<Index> survivors;
  for (Index k = 0; k < n; ++k)
    if (expo[static_cast<std::size_t>(k)] > 0) {
      pos[static_cast<std::size_t>(k)] = static_cast<Index>(survivors.size());
      survivors.push_back(k);
    }
  const Index n2 = static_cast<Index>(survivors.size());

  // Decrementing one shared column keeps survivor rows strictly ascending.
  std::vector<Index> ti, tj;
  std::vector<Degree> tv;
  for (Index j = 0; j < s.basis.degs.cols; ++j)
    for (Index k = s.basis.degs.colptr[j]; k < s.basis.degs.colptr[j + 1]; ++k) {
      Index row = s.basis.degs.rowidx[k];
      if (pos[static_cast<std::size_t>(row)] < 0) continue;
      Degree d = s.basis.degs.vals[k];
      if (j == idx) --d;
      if (d == 0) continue;
      ti.push_back(pos[static_cast<std::size_t>(row)]);
      tj.push_back(j);
      tv.push_back(d);
    }
  DPoly out;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.dvars = s.dvars;
  out.ivars = s.ivars;
  out.basis.vars = s.ivars;
  out.basis.degs = from_triplets(ti, tj, tv, n2, s.basis.degs.cols);

  SparseMat<double> c(s.coeff.rows, s.m2 * n2);
  for (Index j = 0; j < s.m2; ++j) {
    for (Index k2 = 0; k2 < n2; ++k2) {
      const Index src = j * n + survivors[static_cast<std::size_t>(k2)];
      const double f = static_cast<double>(expo[static_cast<std::size_t>(survivors[static_cast<std::size_t>(k2)])]);
      for (Index t = s.coeff.colptr[src]; t < s.coeff.colptr[src + 1]; ++t) {
        double val = s.coeff.vals[t] * f;
        if (val == 0.0) continue;
        c.vals.push_back(val);
        c.rowidx.push_back(s.coeff.rowidx[t]);
      }
      c.colptr[j * n2 + k2 + 1] = c.nnz();
    }
  }
  out.coeff = std::move(c);
  return out;
}

DPoly subs(const DPoly& s, const std::string& v, const PPoly& r) {
  require_ivar(s, v, "subs");
  if (r.m1 != 1 || r.m2 != 1) throw DimensionError("subs: replacement must be scalar");
  const Index idx = var_index(s.ivars, v);
  if (idx < 0) return s;
  const Index n = s.nmon();

  std::vector<Degree> expo(static_cast<std::size_t>(n), 0);
  for (Index k = s.basis.degs.colptr[idx]; k < s.basis.degs.colptr[idx + 1]; ++k)
    expo[static_cast<std::size_t>(s.basis.degs.rowidx[k])] = s.basis.degs.vals[k];
  Degree emax = 0;
  for (Degree e : expo) emax = std::max(emax, e);

  DPoly acc = dpoly_zero(s.m1, s.m2);
  PPoly rpow = ppoly_constant(1.0);
  for (Degree e = 0; e <= emax; ++e) {
    if (e > 0) rpow = ppoly_mul(rpow, r);
    // Slice of s: monomials with v-exponent exactly e, with v zeroed out.
    std::vector<Index> rows;
    for (Index k = 0; k < n; ++k)
      if (expo[static_cast<std::size_t>(k)] == e) rows.push_back(k);
    if (rows.empty()) continue;
    std::vector<Index> ti, tj;
    std::vector<Degree> tv;
    for (Index j = 0; j < s.basis.degs.cols; ++j) {
      if (j == idx) continue;
      for (Index k = s.basis.degs.colptr[j]; k < s.basis.degs.colptr[j + 1]; ++k) {
        Index row = s.basis.degs.rowidx[k];
        if (expo[static_cast<std::size_t>(row)] != e) continue;
        auto it = std::lower_bound(rows.begin(), rows.end(), row);
        ti.push_back(it - rows.begin());
        tj.push_back(j);
        tv.push_back(s.basis.degs.vals[k]);
      }
    }
    DPoly part;
    part.m1 = s.m1;
    part.m2 = s.m2;
    part.dvars = s.dvars;
    part.ivars = s.ivars;
    part.basis.vars = s.ivars;
    part.basis.degs = from_triplets(ti, tj, tv, static_cast<Index>(rows.size()), s.ivars.size());
    std::vector<Index> colsel;
    for (Index j = 0; j < s.m2; ++j)
      for (Index k : rows) colsel.push_back(j * n + k);
    part.coeff = gather_cols(s.coeff, colsel);
    acc = add(acc, mul_poly(part, rpow, Side::Right));
  }
  return drop_var_if_unused(std::move(acc), v);
}

DPoly integrate(const DPoly& s, const std::string& v) {
  require_ivar(s, v, "integrate");
  DPoly src = s;
  Index idx = var_index(src.ivars, v);
  if (idx < 0) {
    // Extend the variable set; merging with an empty basis over {v} keeps
    // every monomial and adds a zero column for v.
    MergedVars mv = merge_vars(src.ivars, make_varset({v}));
    DegreeMatrix wider = inject_vars(src.basis, mv.map_a, mv.vars);
    src.ivars = mv.vars;
    src.basis = std::move(wider);
    idx = var_index(src.ivars, v);
  }
  const Index n = src.nmon();
  std::vector<Degree> expo(static_cast<std::size_t>(n), 0);
  for (Index k = src.basis.degs.colptr[idx]; k < src.basis.degs.colptr[idx + 1]; ++k)
    expo[static_cast<std::size_t>(src.basis.degs.rowidx[k])] = src.basis.degs.vals[k];

  std::vector<Index> ti, tj;
  std::vector<Degree> tv;
  for (Index j = 0; j < src.basis.degs.cols; ++j)
    for (Index k = src.basis.degs.colptr[j]; k < src.basis.degs.colptr[j + 1]; ++k) {
      ti.push_back(src.basis.degs.rowidx[k]);
      tj.push_back(j);
      tv.push_back(src.basis.degs.vals[k]);
    }
  for (Index k = 0; k < n; ++k) {
    ti.push_back(k);
    tj.push_back(idx);
    tv.push_back(1);  // merges with the existing exponent, if any
  }
  DPoly out;
  out.m1 = src.m1;
  out.m2 = src.m2;
  out.dvars = src.dvars;
  out.ivars = src.ivars;
  out.basis.vars = src.ivars;
  out.basis.degs = from_triplets(ti, tj, tv, n, src.ivars.size());

  SparseMat<double> c(src.coeff.rows, src.coeff.cols);
  for (Index j = 0; j < src.m2; ++j)
    for (Index k = 0; k < n; ++k) {
      const Index col = j * n + k;
      const double f = 1.0 / (static_cast<double>(expo[static_cast<std::size_t>(k)]) + 1.0);
      for (Index t = src.coeff.colptr[col]; t < src.coeff.colptr[col + 1]; ++t) {
        c.vals.push_back(src.coeff.vals[t] * f);
        c.rowidx.push_back(src.coeff.rowidx[t]);
      }
      c.colptr[col + 1] = c.nnz();
    }
  out.coeff = std::move(c);
  return out;
}

DPoly integrate_def(const DPoly& s, const std::string& v, double lo, double hi) {
  DPoly anti = integrate(s, v);
  DPoly upper = subs(anti, v, ppoly_constant(hi));
  DPoly lower = subs(anti, v, ppoly_constant(lo));
  return add(upper, scale(lower, -1.0));
}

DPoly hcat(const DPoly& a, const DPoly& b) {
  if (a.m1 != b.m1) throw DimensionError("hcat: row counts differ");
  MergedVars dv = merge_vars(a.dvars, b.dvars);
  MergedBases mb = merge_bases(a.basis, b.basis);
  DPoly aw = relabel(a, dv.vars, dv.map_a, mb.basis, mb.map_a);
  DPoly bw = relabel(b, dv.vars, dv.map_b, mb.basis, mb.map_b);
  aw.m2 = a.m2 + b.m2;
  aw.coeff = hcat(aw.coeff, bw.coeff);
  return aw;
}

DPoly vcat(const DPoly& a, const DPoly& b) {
  if (a.m2 != b.m2) throw DimensionError("vcat: column counts differ");
  MergedVars dv = merge_vars(a.dvars, b.dvars);
  MergedBases mb = merge_bases(a.basis, b.basis);
  DPoly aw = relabel(a, dv.vars, dv.map_a, mb.basis, mb.map_a);
  DPoly bw = relabel(b, dv.vars, dv.map_b, mb.basis, mb.map_b);
  aw.m1 = a.m1 + b.m1;
  aw.coeff = vcat(aw.coeff, bw.coeff);
  return aw;
}

DPoly transpose(const DPoly& s) {
  const Index q = s.q(), n = s.nmon();
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  ti.reserve(s.coeff.vals.size());
  tj.reserve(s.coeff.vals.size());
  tv.reserve(s.coeff.vals.size());
  for (Index c = 0; c < s.coeff.cols; ++c) {
    const Index j = n == 0 ? 0 : c / n;
    const Index k = n == 0 ? 0 : c % n;
    for (Index t = s.coeff.colptr[c]; t < s.coeff.colptr[c + 1]; ++t) {
      const Index r = s.coeff.rowidx[t];
      const Index i = r / (q + 1);
      const Index l = r % (q + 1);
      ti.push_back(j * (q + 1) + l);
      tj.push_back(i * n + k);
      tv.push_back(s.coeff.vals[t]);
    }
  }
  DPoly out;
  out.m1 = s.m2;
  out.m2 = s.m1;
  out.dvars = s.dvars;
  out.ivars = s.ivars;
  out.basis = s.basis;
  out.coeff = from_triplets(ti, tj, tv, s.m2 * (q + 1), s.m1 * n);
  return out;
}

DPoly get_entry(const DPoly& s, Index i, Index j) {
  if (i < 0 || i >= s.m1 || j < 0 || j >= s.m2) throw IndexError("get_entry: out of range");
  const Index q = s.q(), n = s.nmon();
  DPoly out;
  out.m1 = 1;
  out.m2 = 1;
  out.dvars = s.dvars;
  out.ivars = s.ivars;
  out.basis = s.basis;
  out.coeff = slice(s.coeff, i * (q + 1), (i + 1) * (q + 1), j * n, (j + 1) * n);
  return out;
}

DPoly set_entry(const DPoly& s, Index i, Index j, const DPoly& e) {
  if (i < 0 || i >= s.m1 || j < 0 || j >= s.m2) throw IndexError("set_entry: out of range");
  if (e.m1 != 1 || e.m2 != 1) throw DimensionError("set_entry: entry must be 1x1");
  MergedVars dv = merge_vars(s.dvars, e.dvars);
  MergedBases mb = merge_bases(s.basis, e.basis);
  DPoly sw = relabel(s, dv.vars, dv.map_a, mb.basis, mb.map_a);
  DPoly ew = relabel(e, dv.vars, dv.map_b, mb.basis, mb.map_b);
  const Index q = sw.q(), n = sw.nmon();
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index c = 0; c < sw.coeff.cols; ++c) {
    const Index jb = n == 0 ? 0 : c / n;
    for (Index t = sw.coeff.colptr[c]; t < sw.coeff.colptr[c + 1]; ++t) {
      const Index ib = sw.coeff.rowidx[t] / (q + 1);
      if (ib == i && jb == j) continue;  // overwritten entry
      ti.push_back(sw.coeff.rowidx[t]);
      tj.push_back(c);
      tv.push_back(sw.coeff.vals[t]);
    }
  }
  for (Index c = 0; c < ew.coeff.cols; ++c)
    for (Index t = ew.coeff.colptr[c]; t < ew.coeff.colptr[c + 1]; ++t) {
      ti.push_back(i * (q + 1) + ew.coeff.rowidx[t]);
      tj.push_back(j * n + c);
      tv.push_back(ew.coeff.vals[t]);
    }
  sw.coeff = from_triplets(ti, tj, tv, sw.coeff.rows, sw.coeff.cols);
  return sw;
}

DPoly compress(const DPoly& s) {
  const Index q = s.q(), n = s.nmon();
  std::vector<char> mon_used(static_cast<std::size_t>(n), 0);
  std::vector<char> dvar_used(static_cast<std::size_t>(q), 0);
  for (Index c = 0; c < s.coeff.cols; ++c) {
    const Index k = n == 0 ? 0 : c % n;
    for (Index t = s.coeff.colptr[c]; t < s.coeff.colptr[c + 1]; ++t) {
      mon_used[static_cast<std::size_t>(k)] = 1;
      const Index l = s.coeff.rowidx[t] % (q + 1);
      if (l > 0) dvar_used[static_cast<std::size_t>(l - 1)] = 1;
    }
  }
  std::vector<Index> keep_mon, keep_dvar;
  for (Index k = 0; k < n; ++k)
    if (mon_used[static_cast<std::size_t>(k)]) keep_mon.push_back(k);
  std::vector<std::string> dnames;
  for (Index l = 0; l < q; ++l)
    if (dvar_used[static_cast<std::size_t>(l)]) {
      keep_dvar.push_back(l);
      dnames.push_back(s.dvars.names[static_cast<std::size_t>(l)]);
    }

  std::vector<Index> rowsel, colsel;
  for (Index i = 0; i < s.m1; ++i) {
    rowsel.push_back(i * (q + 1));
    for (Index l : keep_dvar) rowsel.push_back(i * (q + 1) + 1 + l);
  }
  for (Index j = 0; j < s.m2; ++j)
    for (Index k : keep_mon) colsel.push_back(j * n + k);

  DPoly out;
  out.m1 = s.m1;
  out.m2 = s.m2;
  out.dvars = VarSet{std::move(dnames)};
  out.ivars = s.ivars;
  out.basis.vars = s.ivars;
  out.basis.degs = gather_rows(s.basis.degs, keep_mon);
  out.coeff = gather_cols(gather_rows(s.coeff, rowsel), colsel);
  return out;
}

PPoly ppoly_add(const PPoly& a, const PPoly& b) { return to_ppoly(add(from_ppoly(a), from_ppoly(b))); }

PPoly ppoly_scale(const PPoly& a, double f) { return to_ppoly(scale(from_ppoly(a), f)); }

PPoly ppoly_mul(const PPoly& a, const PPoly& b) {
  return to_ppoly(mul_poly(from_ppoly(a), b, Side::Right));
}

PPoly ppoly_pow(const PPoly& a, Degree e) {
  if (a.m1 != 1 || a.m2 != 1) throw DimensionError("ppoly_pow: base must be scalar");
  PPoly r = ppoly_constant(1.0);
  for (Degree i = 0; i < e; ++i) r = ppoly_mul(r, a);
  return r;
}

PPoly ppoly_transpose(const PPoly& a) { return to_ppoly(transpose(from_ppoly(a))); }

PPoly ppoly_from_grid(const std::vector<std::vector<PPoly>>& cells) {
  if (cells.empty() || cells.front().empty()) throw ArgumentError("ppoly_from_grid: empty grid");
  const std::size_t ncols = cells.front().size();
  DPoly rows = dpoly_zero(0, static_cast<Index>(ncols));
  for (const auto& rowcells : cells) {
    if (rowcells.size() != ncols) throw DimensionError("ppoly_from_grid: ragged grid");
    DPoly row = from_ppoly(rowcells[0]);
    if (row.m1 != 1 || row.m2 != 1) throw DimensionError("ppoly_from_grid: cells must be scalar");
    for (std::size_t c = 1; c < ncols; ++c) {
      DPoly cell = from_ppoly(rowcells[c]);
      if (cell.m1 != 1 || cell.m2 != 1) throw DimensionError("ppoly_from_grid: cells must be scalar");
      row = hcat(row, cell);
    }
    rows = vcat(rows, row);
  }
  return to_ppoly(rows);
}

}  // namespace sosforge
