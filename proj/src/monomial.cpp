#include "sosforge/monomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sosforge {

VarSet make_varset(std::vector<std::string> names) {
  for (const auto& n : names) {
    if (n.empty()) throw ArgumentError("make_varset: empty name");
    if (!(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_'))
      throw ArgumentError("make_varset: name must start with a letter or underscore: " + n);
    for (char c : n)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw ArgumentError("make_varset: invalid character in name: " + n);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return VarSet{std::move(names)};
}

Index var_index(const VarSet& vs, const std::string& name) {
  auto it = std::lower_bound(vs.names.begin(), vs.names.end(), name);
  if (it == vs.names.end() || *it != name) return -1;
  return it - vs.names.begin();
}

MergedVars merge_vars(const VarSet& a, const VarSet& b) {
  MergedVars out;
  std::vector<std::string> u;
  u.reserve(a.names.size() + b.names.size());
  std::set_union(a.names.begin(), a.names.end(), b.names.begin(), b.names.end(),
                 std::back_inserter(u));
  out.vars = VarSet{std::move(u)};
  out.map_a.reserve(a.names.size());
  out.map_b.reserve(b.names.size());
  for (const auto& n : a.names) out.map_a.push_back(var_index(out.vars, n));
  for (const auto& n : b.names) out.map_b.push_back(var_index(out.vars, n));
  return out;
}

DegreeMatrix constant_basis(const VarSet& vars) {
  return DegreeMatrix{vars, SparseMat<Degree>(1, vars.size())};
}

DegreeMatrix full_basis(const VarSet& vars, Degree dmax) {
  const Index p = vars.size();
  std::vector<Index> ti, tj;
  std::vector<Degree> tv;
  std::vector<Degree> row(static_cast<std::size_t>(p), 0);
  Index nrows = 0;
  // Ascending lexicographic emission: position 0 is the most significant
  // digit, so recurse on it last.
  auto emit = [&]() {
    for (Index j = 0; j < p; ++j)
      if (row[static_cast<std::size_t>(j)] != 0) {
        ti.push_back(nrows);
        tj.push_back(j);
        tv.push_back(row[static_cast<std::size_t>(j)]);
      }
    ++nrows;
  };
  auto rec = [&](auto&& self, Index col, Degree left) -> void {
    if (col == p) {
      emit();
      return;
    }
    for (Degree d = 0; d <= left; ++d) {
      row[static_cast<std::size_t>(col)] = d;
      self(self, col + 1, left - d);
    }
    row[static_cast<std::size_t>(col)] = 0;
  };
  if (p == 0) {
    emit();  // only the constant monomial
  } else {
    rec(rec, 0, dmax);
  }
  DegreeMatrix out;
  out.vars = vars;
  out.degs = from_triplets(ti, tj, tv, nrows, p);
  return out;
}

Degree total_degree(const DegreeMatrix& z) {
  std::vector<Degree> sums(static_cast<std::size_t>(z.nmon()), 0);
  for (Index j = 0; j < z.degs.cols; ++j)
    for (Index k = z.degs.colptr[j]; k < z.degs.colptr[j + 1]; ++k)
      sums[static_cast<std::size_t>(z.degs.rowidx[k])] += z.degs.vals[k];
  Degree m = 0;
  for (Degree s : sums) m = std::max(m, s);
  return m;
}

Degree max_entry(const DegreeMatrix& z) {
  Degree m = 0;
  for (Degree v : z.degs.vals) m = std::max(m, v);
  return m;
}

LexKeys lex_keys(const DegreeMatrix& z, Degree dmax) {
  if (max_entry(z) > dmax) throw ArgumentError("lex_keys: dmax below largest exponent");
  const Index p = z.vars.size();
  const double radix = static_cast<double>(dmax) + 1.0;
  constexpr double kExact = 9007199254740992.0;  // 2^53

  // Widest group of columns whose packed key stays exactly representable.
  Index width = 1;
  if (p > 0) {
    double pow = radix;
    while (width < p && pow * radix < kExact) {
      pow *= radix;
      ++width;
    }
    if (radix == 1.0) width = p;  // all keys are 0
  }

  LexKeys out;
  out.nrows = z.nmon();
  out.nstages = p == 0 ? 1 : (p + width - 1) / width;
  out.keys.assign(static_cast<std::size_t>(out.nrows * out.nstages), 0.0);
  if (p == 0) return out;

  // keys[r][t] = sum over columns j in stage t of deg(r,j) * radix^(hi-1-j)
  // where hi is the stage's end column, i.e. plain radix packing per stage.
  for (Index j = 0; j < p; ++j) {
    Index t = j / width;
    Index hi = std::min((t + 1) * width, p);
    double w = std::pow(radix, static_cast<double>(hi - 1 - j));
    for (Index k = z.degs.colptr[j]; k < z.degs.colptr[j + 1]; ++k) {
      out.keys[static_cast<std::size_t>(z.degs.rowidx[k] * out.nstages + t)] +=
          static_cast<double>(z.degs.vals[k]) * w;
    }
  }
  return out;
}

Canonicalized canonicalize(const DegreeMatrix& z) {
  const Index n = z.nmon();
  LexKeys keys = lex_keys(z, max_entry(z));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return keys.less(a, b); });

  Canonicalized out;
  out.rowmap.assign(static_cast<std::size_t>(n), -1);
  std::vector<Index> reps;  // representative old row per unique monomial
  for (Index i = 0; i < n; ++i) {
    Index r = order[static_cast<std::size_t>(i)];
    if (reps.empty() || !keys.equal(reps.back(), r)) reps.push_back(r);
    out.rowmap[static_cast<std::size_t>(r)] = static_cast<Index>(reps.size()) - 1;
  }
  out.basis.vars = z.vars;
  out.basis.degs = gather_rows(z.degs, reps);
  return out;
}

DegreeMatrix inject_vars(const DegreeMatrix& z, const std::vector<Index>& colmap,
                         const VarSet& wider) {
  for (std::size_t j = 1; j < colmap.size(); ++j)
    if (colmap[j - 1] >= colmap[j]) throw ArgumentError("inject_vars: map must be increasing");
  DegreeMatrix out;
  out.vars = wider;
  out.degs = scatter_cols(z.degs, colmap, wider.size());
  return out;
}

MergedBases merge_bases(const DegreeMatrix& a, const DegreeMatrix& b) {
  MergedVars mv = merge_vars(a.vars, b.vars);
  DegreeMatrix aw = inject_vars(a, mv.map_a, mv.vars);
  DegreeMatrix bw = inject_vars(b, mv.map_b, mv.vars);
  DegreeMatrix stacked{mv.vars, vcat(aw.degs, bw.degs)};
  Canonicalized c = canonicalize(stacked);
  MergedBases out;
  out.basis = std::move(c.basis);
  out.map_a.assign(c.rowmap.begin(), c.rowmap.begin() + a.nmon());
  out.map_b.assign(c.rowmap.begin() + a.nmon(), c.rowmap.end());
  return out;
}

KronBases kron_bases(const DegreeMatrix& a, const DegreeMatrix& b) {
  MergedVars mv = merge_vars(a.vars, b.vars);
  DegreeMatrix aw = inject_vars(a, mv.map_a, mv.vars);
  DegreeMatrix bw = inject_vars(b, mv.map_b, mv.vars);
  // Row i*nb+j of the raw product basis is row i of A plus row j of B:
  // kron against a column of ones replicates, then the two replicas add.
  const Index na = a.nmon(), nb = b.nmon();
  SparseMat<Degree> ones_a(na, 1), ones_b(nb, 1);
  for (Index i = 0; i < na; ++i) {
    ones_a.vals.push_back(1);
    ones_a.rowidx.push_back(i);
  }
  ones_a.colptr[1] = na;
  for (Index i = 0; i < nb; ++i) {
    ones_b.vals.push_back(1);
    ones_b.rowidx.push_back(i);
  }
  ones_b.colptr[1] = nb;
  SparseMat<Degree> raw = add(kron(aw.degs, ones_b), kron(ones_a, bw.degs));
  Canonicalized c = canonicalize(DegreeMatrix{mv.vars, std::move(raw)});
  return KronBases{std::move(c.basis), std::move(c.rowmap)};
}

}  // namespace sosforge
