#pragma once

#include <string>
#include <vector>

#include "sosforge/sparse.hpp"

namespace sosforge {

// Ordered set of variable names. Names are kept sorted and unique; the column
// order of every DegreeMatrix over the set is this name order.
struct VarSet {
  std::vector<std::string> names;

  Index size() const { return static_cast<Index>(names.size()); }
  bool operator==(const VarSet& o) const { return names == o.names; }
};

// Validates, sorts and dedups.
VarSet make_varset(std::vector<std::string> names);

// Position of `name` in `vs`, or -1.
Index var_index(const VarSet& vs, const std::string& name);

struct MergedVars {
  VarSet vars;
  std::vector<Index> map_a;  // column j of A lands at map_a[j]
  std::vector<Index> map_b;
};

MergedVars merge_vars(const VarSet& a, const VarSet& b);

// Monomial basis: one row per monomial, one column per variable, entries are
// exponents. Canonical when rows are sorted ascending lexicographically with
// the first column most significant and no duplicate rows.
struct DegreeMatrix {
  VarSet vars;
  SparseMat<Degree> degs;  // degs.cols == vars.size()

  Index nmon() const { return degs.rows; }
  bool operator==(const DegreeMatrix& o) const { return vars == o.vars && degs == o.degs; }
};

// Single zero-degree row over `vars` (the constant monomial).
DegreeMatrix constant_basis(const VarSet& vars = {});

// All monomials of total degree <= dmax over `vars`, in canonical order.
// Row count is binom(p + dmax, dmax).
DegreeMatrix full_basis(const VarSet& vars, Degree dmax);

// Largest total degree over all rows (0 for an empty basis).
Degree total_degree(const DegreeMatrix& z);

// Largest single exponent (0 for an empty basis).
Degree max_entry(const DegreeMatrix& z);

// Per-row sort keys for the canonical order. Columns are grouped left to
// right into stages of the widest width w such that (dmax+1)^w stays below
// 2^53, so each stage key is an exactly representable integer-valued double.
// Comparing stage keys left to right is exactly the row lexicographic order.
struct LexKeys {
  Index nrows = 0;
  Index nstages = 0;
  std::vector<double> keys;  // row-major nrows x nstages

  // Three-way style comparison of rows r and s: true when row r < row s.
  bool less(Index r, Index s) const {
    for (Index t = 0; t < nstages; ++t) {
      double a = keys[static_cast<std::size_t>(r * nstages + t)];
      double b = keys[static_cast<std::size_t>(s * nstages + t)];
      if (a != b) return a < b;
    }
    return false;
  }
  bool equal(Index r, Index s) const {
    for (Index t = 0; t < nstages; ++t)
      if (keys[static_cast<std::size_t>(r * nstages + t)] !=
          keys[static_cast<std::size_t>(s * nstages + t)])
        return false;
    return true;
  }
};

// dmax must dominate every entry of z.
LexKeys lex_keys(const DegreeMatrix& z, Degree dmax);

struct Canonicalized {
  DegreeMatrix basis;        // sorted, deduped
  std::vector<Index> rowmap;  // old row i -> new row rowmap[i]
};

Canonicalized canonicalize(const DegreeMatrix& z);

// Reindexes the basis onto a wider variable set. colmap[j] is the new column
// of old column j; must be strictly increasing (zero-degree columns inserted
// elsewhere), which keeps canonical row order intact.
DegreeMatrix inject_vars(const DegreeMatrix& z, const std::vector<Index>& colmap, const VarSet& wider);

struct MergedBases {
  DegreeMatrix basis;
  std::vector<Index> map_a;  // row i of A -> row map_a[i] of basis
  std::vector<Index> map_b;
};

// Union of two bases over the union of their variables.
MergedBases merge_bases(const DegreeMatrix& a, const DegreeMatrix& b);

struct KronBases {
  DegreeMatrix basis;
  std::vector<Index> prodmap;  // raw pair i*b.nmon()+j -> row of basis
};

// Basis of all pairwise monomial products a_i * b_j.
KronBases kron_bases(const DegreeMatrix& a, const DegreeMatrix& b);

}  // namespace sosforge
