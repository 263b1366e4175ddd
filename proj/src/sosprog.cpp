#include "sosforge/sosprog.hpp"

#include <algorithm>

namespace sosforge {

namespace {

Index register_dvar(SosProgram& prog, Index block, Index r, Index c) {
  std::string name = "coeff_" + std::to_string(prog.name_counter++);
  if (prog.by_name.count(name)) throw RegistrationError("duplicate decision variable " + name);
  if (var_index(prog.ivars, name) >= 0)
    throw RegistrationError("decision variable collides with independent variable " + name);
  prog.registry.push_back({name, block, r, c});
  prog.by_name.emplace(name, static_cast<Index>(prog.registry.size()) - 1);
  return static_cast<Index>(prog.registry.size()) - 1;
}

void require_canonical_basis(const DegreeMatrix& z, const char* who) {
  if (!is_canonical(z.degs)) throw ArgumentError(std::string(who) + ": basis not canonical");
  LexKeys keys = lex_keys(z, max_entry(z));
  for (Index i = 1; i < z.nmon(); ++i)
    if (!keys.less(i - 1, i)) throw ArgumentError(std::string(who) + ": basis rows not ascending");
}

// Variables of prog.ivars that actually appear in d's basis.
VarSet used_vars(const DPoly& d) {
  std::vector<std::string> names;
  for (Index j = 0; j < d.basis.degs.cols; ++j)
    if (d.basis.degs.colptr[j] != d.basis.degs.colptr[j + 1])
      names.push_back(d.ivars.names[static_cast<std::size_t>(j)]);
  return VarSet{std::move(names)};
}

}  // namespace

void declare_ivars(SosProgram& prog, const std::vector<std::string>& names) {
  VarSet incoming = make_varset(names);
  for (const auto& n : incoming.names)
    if (prog.by_name.count(n))
      throw RegistrationError("independent variable collides with decision variable " + n);
  MergedVars mv = merge_vars(prog.ivars, incoming);
  prog.ivars = mv.vars;
}

DPoly declare_decvar(SosProgram& prog, const std::string& name) {
  VarSet checked = make_varset({name});
  if (prog.by_name.count(name)) throw RegistrationError("duplicate decision variable " + name);
  if (var_index(prog.ivars, name) >= 0)
    throw RegistrationError("decision variable collides with independent variable " + name);
  prog.registry.push_back({name, -1, -1, -1});
  prog.by_name.emplace(name, static_cast<Index>(prog.registry.size()) - 1);
  return dpoly_dvar(name);
}

std::vector<std::vector<DPoly>> quadvar(SosProgram& prog, const std::vector<DegreeMatrix>& Z1,
                                        const std::vector<DegreeMatrix>& Z2,
                                        const std::vector<Index>& mdims,
                                        const std::vector<Index>& ndims, QuadOption opt) {
  const Index r = static_cast<Index>(Z1.size());
  const Index p = static_cast<Index>(Z2.size());
  if (r == 0 || p == 0) throw ArgumentError("quadvar: empty cell list");
  if (static_cast<Index>(mdims.size()) != r || static_cast<Index>(ndims.size()) != p)
    throw DimensionError("quadvar: dimension list length mismatch");
  for (Index i = 0; i < r; ++i) {
    if (mdims[static_cast<std::size_t>(i)] < 1) throw ArgumentError("quadvar: mdims must be >= 1");
    require_canonical_basis(Z1[static_cast<std::size_t>(i)], "quadvar");
  }
  for (Index j = 0; j < p; ++j) {
    if (ndims[static_cast<std::size_t>(j)] < 1) throw ArgumentError("quadvar: ndims must be >= 1");
    require_canonical_basis(Z2[static_cast<std::size_t>(j)], "quadvar");
  }
  const bool tied = opt == QuadOption::Sym || opt == QuadOption::Pos;
  if (tied) {
    if (r != p) throw OptionError("quadvar: sym/pos need a square grid");
    for (Index i = 0; i < r; ++i) {
      if (mdims[static_cast<std::size_t>(i)] != ndims[static_cast<std::size_t>(i)])
        throw OptionError("quadvar: sym/pos need matching cell dimensions");
      if (Z1[static_cast<std::size_t>(i)].nmon() != Z2[static_cast<std::size_t>(i)].nmon())
        throw OptionError("quadvar: sym/pos need matching cell basis sizes");
    }
  }

  // Composite row/column offsets of the coefficient matrix Q.
  std::vector<Index> roff(static_cast<std::size_t>(r) + 1, 0);
  for (Index i = 0; i < r; ++i)
    roff[static_cast<std::size_t>(i) + 1] =
        roff[static_cast<std::size_t>(i)] +
        mdims[static_cast<std::size_t>(i)] * Z1[static_cast<std::size_t>(i)].nmon();
  std::vector<Index> coff(static_cast<std::size_t>(p) + 1, 0);
  for (Index j = 0; j < p; ++j)
    coff[static_cast<std::size_t>(j) + 1] =
        coff[static_cast<std::size_t>(j)] +
        ndims[static_cast<std::size_t>(j)] * Z2[static_cast<std::size_t>(j)].nmon();
  const Index nrow = roff.back(), ncol = coff.back();

  // Register the coefficient variables. Tied grids use the upper triangle of
  // the composite, column-major; untied grids take every slot column-major.
  std::vector<Index> slot;  // (R, C) -> registry index, row-major R*ncol+C
  slot.assign(static_cast<std::size_t>(nrow * ncol), -1);
  if (tied) {
    const Index block = opt == QuadOption::Pos ? static_cast<Index>(prog.psd_sides.size()) : -1;
    if (opt == QuadOption::Pos) prog.psd_sides.push_back(nrow);
    for (Index C = 0; C < ncol; ++C)
      for (Index R = 0; R <= C; ++R) {
        Index id = register_dvar(prog, block, R, C);
        slot[static_cast<std::size_t>(R * ncol + C)] = id;
        slot[static_cast<std::size_t>(C * ncol + R)] = id;
      }
  } else {
    for (Index C = 0; C < ncol; ++C)
      for (Index R = 0; R < nrow; ++R)
        slot[static_cast<std::size_t>(R * ncol + C)] = register_dvar(prog, -1, -1, -1);
  }

  std::vector<std::vector<DPoly>> grid(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) {
    const Index mi = mdims[static_cast<std::size_t>(i)];
    const DegreeMatrix& z1 = Z1[static_cast<std::size_t>(i)];
    const Index k1 = z1.nmon();
    for (Index j = 0; j < p; ++j) {
      const Index nj = ndims[static_cast<std::size_t>(j)];
      const DegreeMatrix& z2 = Z2[static_cast<std::size_t>(j)];
      const Index k2 = z2.nmon();

      // Names used by this cell, in registry order, then sorted for the
      // DPoly's variable set.
      std::vector<std::string> names;
      names.reserve(static_cast<std::size_t>(mi * k1 * nj * k2));
      for (Index a = 0; a < mi * k1; ++a)
        for (Index b = 0; b < nj * k2; ++b) {
          Index id = slot[static_cast<std::size_t>((roff[static_cast<std::size_t>(i)] + a) * ncol +
                                                   coff[static_cast<std::size_t>(j)] + b)];
          names.push_back(prog.registry[static_cast<std::size_t>(id)].name);
        }
      VarSet cellvars = make_varset(names);

      KronBases kb = kron_bases(z1, z2);
      const Index n3 = kb.basis.nmon();
      const Index qc = cellvars.size();

      std::vector<Index> ti, tj;
      std::vector<double> tv;
      ti.reserve(static_cast<std::size_t>(mi * k1 * nj * k2));
      tj.reserve(ti.capacity());
      tv.reserve(ti.capacity());
      for (Index alpha = 0; alpha < mi; ++alpha)
        for (Index a = 0; a < k1; ++a)
          for (Index beta = 0; beta < nj; ++beta)
            for (Index b = 0; b < k2; ++b) {
              const Index R = roff[static_cast<std::size_t>(i)] + alpha * k1 + a;
              const Index C = coff[static_cast<std::size_t>(j)] + beta * k2 + b;
              Index id = slot[static_cast<std::size_t>(R * ncol + C)];
              const std::string& nm = prog.registry[static_cast<std::size_t>(id)].name;
              ti.push_back(alpha * (qc + 1) + 1 + var_index(cellvars, nm));
              tj.push_back(beta * n3 + kb.prodmap[static_cast<std::size_t>(a * k2 + b)]);
              tv.push_back(1.0);
            }

      DPoly cell;
      cell.m1 = mi;
      cell.m2 = nj;
      cell.dvars = cellvars;
      cell.ivars = kb.basis.vars;
      cell.basis = kb.basis;
      cell.coeff = from_triplets(ti, tj, tv, mi * (qc + 1), nj * n3);
      grid[static_cast<std::size_t>(i)].push_back(std::move(cell));
    }
  }
  return grid;
}

DPoly sosvar(SosProgram& prog, const DegreeMatrix& z) {
  return quadvar(prog, {z}, {z}, {1}, {1}, QuadOption::Pos)[0][0];
}

DPoly polymatrixvar(SosProgram& prog, const DegreeMatrix& z, Index m, Index n, QuadOption opt) {
  if (m < 1 || n < 1) throw DimensionError("polymatrixvar: shape must be positive");
  require_canonical_basis(z, "polymatrixvar");
  if (opt == QuadOption::Pos)
    throw OptionError("polymatrixvar: pos is not meaningful here; use matrix_ineq");
  if (opt == QuadOption::Sym && m != n) throw OptionError("polymatrixvar: sym needs a square matrix");
  const Index k = z.nmon();

  // cellvar[(i*n + j)*k + b] is the registry id feeding entry (i,j), monomial b.
  std::vector<Index> cellvar(static_cast<std::size_t>(m * n * k), -1);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      if (opt == QuadOption::Sym && i > j) {
        for (Index b = 0; b < k; ++b)
          cellvar[static_cast<std::size_t>((i * n + j) * k + b)] =
              cellvar[static_cast<std::size_t>((j * n + i) * k + b)];
        continue;
      }
      for (Index b = 0; b < k; ++b)
        cellvar[static_cast<std::size_t>((i * n + j) * k + b)] = register_dvar(prog, -1, -1, -1);
    }

  std::vector<std::string> names;
  for (Index id : cellvar) names.push_back(prog.registry[static_cast<std::size_t>(id)].name);
  VarSet dv = make_varset(names);
  const Index q = dv.size();

  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index b = 0; b < k; ++b) {
        Index id = cellvar[static_cast<std::size_t>((i * n + j) * k + b)];
        const std::string& nm = prog.registry[static_cast<std::size_t>(id)].name;
        ti.push_back(i * (q + 1) + 1 + var_index(dv, nm));
        tj.push_back(j * k + b);
        tv.push_back(1.0);
      }
  DPoly out;
  out.m1 = m;
  out.m2 = n;
  out.dvars = dv;
  out.ivars = z.vars;
  out.basis = z;
  out.coeff = from_triplets(ti, tj, tv, m * (q + 1), n * k);
  return out;
}

void eq_constraint(SosProgram& prog, const DPoly& d) {
  for (const auto& n : d.ivars.names)
    if (var_index(prog.ivars, n) < 0)
      throw RegistrationError("eq_constraint: undeclared independent variable " + n);
  for (const auto& n : d.dvars.names)
    if (!prog.by_name.count(n))
      throw RegistrationError("eq_constraint: unregistered decision variable " + n);
  prog.equalities.push_back(compress(d));
}

void sos_ineq(SosProgram& prog, const DPoly& d) {
  if (d.m1 != 1 || d.m2 != 1) throw DimensionError("sos_ineq: expected a scalar polynomial");
  DPoly dc = compress(d);
  Degree deg = total_degree(dc.basis);
  if (deg % 2 == 1)
    prog.warnings.push_back("sos_ineq: odd-degree polynomial cannot be a sum of squares");
  DegreeMatrix gram = full_basis(used_vars(dc), (deg + 1) / 2);
  DPoly g = sosvar(prog, gram);
  eq_constraint(prog, add(dc, scale(g, -1.0)));
}

void matrix_ineq(SosProgram& prog, const DPoly& d) {
  if (d.m1 != d.m2) throw DimensionError("matrix_ineq: matrix must be square");
  DPoly dc = compress(d);
  Degree deg = total_degree(dc.basis);
  if (deg % 2 == 1)
    prog.warnings.push_back("matrix_ineq: odd-degree polynomial cannot be a matrix square sum");
  DegreeMatrix gram = full_basis(used_vars(dc), (deg + 1) / 2);
  DPoly g = quadvar(prog, {gram}, {gram}, {d.m1}, {d.m1}, QuadOption::Pos)[0][0];
  eq_constraint(prog, add(dc, scale(g, -1.0)));
}

void set_objective(SosProgram& prog, const std::vector<std::pair<std::string, double>>& weights,
                   bool maximize) {
  for (const auto& [name, w] : weights) {
    (void)w;
    if (!prog.by_name.count(name))
      throw RegistrationError("set_objective: unregistered decision variable " + name);
  }
  prog.objective = weights;
  prog.maximize = maximize;
}

SdpProblem assemble(const SosProgram& prog) {
  SdpProblem sdp;
  sdp.maximize = prog.maximize;
  sdp.blocks = prog.psd_sides;

  // Free variables first, then column-major slabs per PSD block.
  std::vector<Index> block_off(prog.psd_sides.size() + 1, 0);
  for (const auto& info : prog.registry)
    if (info.block < 0) ++sdp.nfree;
  block_off[0] = sdp.nfree;
  for (std::size_t bdx = 0; bdx < prog.psd_sides.size(); ++bdx)
    block_off[bdx + 1] = block_off[bdx] + prog.psd_sides[bdx] * prog.psd_sides[bdx];

  Index next_free = 0;
  for (const auto& info : prog.registry) {
    if (info.block < 0) {
      sdp.varmap.emplace(info.name, next_free++);
    } else {
      const Index side = prog.psd_sides[static_cast<std::size_t>(info.block)];
      sdp.varmap.emplace(info.name,
                         block_off[static_cast<std::size_t>(info.block)] + info.c * side + info.r);
    }
  }

  // One scalar row per (equality, matrix entry, monomial); w/2 mirror split
  // for off-diagonal PSD slots keeps each slab symmetric.
  auto emit_var = [&](std::vector<Index>& cols, std::vector<double>& vals,
                      const std::string& name, double w) {
    const DecVarInfo& info = prog.registry[static_cast<std::size_t>(prog.by_name.at(name))];
    if (info.block < 0) {
      cols.push_back(sdp.varmap.at(name));
      vals.push_back(w);
      return;
    }
    const Index side = prog.psd_sides[static_cast<std::size_t>(info.block)];
    const Index off = block_off[static_cast<std::size_t>(info.block)];
    if (info.r == info.c) {
      cols.push_back(off + info.c * side + info.r);
      vals.push_back(w);
    } else {
      cols.push_back(off + info.c * side + info.r);
      vals.push_back(w / 2.0);
      cols.push_back(off + info.r * side + info.c);
      vals.push_back(w / 2.0);
    }
  };

  std::vector<Index> ai, aj;
  std::vector<double> av;
  std::vector<double> brow;
  Index m = 0;
  for (const DPoly& d : prog.equalities) {
    const Index q = d.q(), n = d.nmon();
    for (Index i = 0; i < d.m1; ++i)
      for (Index j = 0; j < d.m2; ++j)
        for (Index k = 0; k < n; ++k) {
          double bval = 0.0;
          std::vector<Index> cols;
          std::vector<double> vals;
          const Index col = j * n + k;
          for (Index t = d.coeff.colptr[col]; t < d.coeff.colptr[col + 1]; ++t) {
            const Index rr = d.coeff.rowidx[t];
            if (rr / (q + 1) != i) continue;
            const Index l = rr % (q + 1);
            if (l == 0)
              bval = -d.coeff.vals[t];
            else
              emit_var(cols, vals, d.dvars.names[static_cast<std::size_t>(l - 1)], d.coeff.vals[t]);
          }
          if (cols.empty() && bval == 0.0) continue;
          if (cols.empty()) sdp.trivially_infeasible = true;
          for (std::size_t t = 0; t < cols.size(); ++t) {
            ai.push_back(m);
            aj.push_back(cols[t]);
            av.push_back(vals[t]);
          }
          brow.push_back(bval);
          ++m;
        }
  }
  sdp.A = from_triplets(ai, aj, av, m, sdp.nvec());
  sdp.b = Eigen::Map<Eigen::VectorXd>(brow.data(), static_cast<Eigen::Index>(brow.size()));

  Eigen::VectorXd c = Eigen::VectorXd::Zero(sdp.nvec());
  for (const auto& [name, w] : prog.objective) {
    std::vector<Index> cols;
    std::vector<double> vals;
    emit_var(cols, vals, name, w);
    for (std::size_t t = 0; t < cols.size(); ++t) c[cols[t]] += vals[t];
  }
  if (prog.maximize) c = -c;
  sdp.c = std::move(c);
  return sdp;
}

}  // namespace sosforge
