#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "sosforge/monomial.hpp"

namespace sosforge {

// Matrix polynomial in independent variables only. Entry (i,j) is
// sum_k coeff(i, j*n + k) * basis_k, with n = basis.nmon().
struct PPoly {
  Index m1 = 1;
  Index m2 = 1;
  VarSet ivars;
  DegreeMatrix basis;        // over ivars
  SparseMat<double> coeff;   // m1 x m2*n

  bool operator==(const PPoly& o) const {
    return m1 == o.m1 && m2 == o.m2 && ivars == o.ivars && basis == o.basis && coeff == o.coeff;
  }
};

// Matrix polynomial that is affine in a set of scalar decision variables.
//
// The coefficient matrix has m1*(q+1) rows and m2*n columns, q = dvars.size(),
// n = basis.nmon(). Row block i (one per matrix row) holds q+1 rows: the first
// carries terms constant in the decision variables, row 1+l the terms linear in
// dvars[l]. Column block j holds one column per basis monomial. Entry (i,j) is
//   sum_k coeff(i*(q+1), j*n+k) * basis_k
//   + sum_l sum_k coeff(i*(q+1)+1+l, j*n+k) * dvars[l] * basis_k.
struct DPoly {
  Index m1 = 1;
  Index m2 = 1;
  VarSet dvars;
  VarSet ivars;
  DegreeMatrix basis;        // over ivars; decision variables never appear here
  SparseMat<double> coeff;   // m1*(q+1) x m2*n

  Index q() const { return dvars.size(); }
  Index nmon() const { return basis.nmon(); }
  bool operator==(const DPoly& o) const {
    return m1 == o.m1 && m2 == o.m2 && dvars == o.dvars && ivars == o.ivars && basis == o.basis &&
           coeff == o.coeff;
  }
};

enum class Side { Left, Right };

// --- construction ---------------------------------------------------------

PPoly ppoly_constant(double v, Index m1 = 1, Index m2 = 1);  // v on every entry
PPoly ppoly_var(const std::string& name);
PPoly ppoly_from_grid(const std::vector<std::vector<PPoly>>& cells);  // scalar cells

// Zero polynomial of the given shape (empty basis).
DPoly dpoly_zero(Index m1, Index m2);

// Lifts: a PPoly is a DPoly with no decision variables.
DPoly from_ppoly(const PPoly& p);
// Fails unless q == 0.
PPoly to_ppoly(const DPoly& s);

// 1x1 DPoly equal to a single declared decision variable.
DPoly dpoly_dvar(const std::string& name);

// Structural sanity check used by tests; throws on violation.
void check_valid(const DPoly& s);
void check_valid(const PPoly& p);

// --- evaluation ------------------------------------------------------------

using PointMap = std::map<std::string, double>;

// Numeric value; every ivar and dvar of s must be present in pt.
Eigen::MatrixXd eval(const DPoly& s, const PointMap& pt);
Eigen::MatrixXd eval(const PPoly& p, const PointMap& pt);

// --- arithmetic ------------------------------------------------------------

DPoly add(const DPoly& a, const DPoly& b);
DPoly scale(const DPoly& a, double f);

// side == Right: s * p (requires s.m2 == p.m1); side == Left: p * s
// (requires p.m2 == s.m1). A 1x1 factor on either side broadcasts.
DPoly mul_poly(const DPoly& s, const PPoly& p, Side side);

// Partial derivative in one independent variable. Unknown v differentiates
// to the zero polynomial of the same shape. Differentiating in a decision
// variable is refused.
DPoly diff(const DPoly& s, const std::string& v);

// Substitutes a scalar polynomial for the independent variable v. r must not
// contain decision variables (the result would leave the affine class).
// Substituting a variable not present returns s unchanged.
DPoly subs(const DPoly& s, const std::string& v, const PPoly& r);

// Indefinite integral in v (constant of integration zero); v is added to the
// variable set when absent.
DPoly integrate(const DPoly& s, const std::string& v);

// Definite integral over v in [lo, hi]; v is eliminated.
DPoly integrate_def(const DPoly& s, const std::string& v, double lo, double hi);

// --- structure -------------------------------------------------------------

DPoly hcat(const DPoly& a, const DPoly& b);
DPoly vcat(const DPoly& a, const DPoly& b);
DPoly transpose(const DPoly& s);
DPoly get_entry(const DPoly& s, Index i, Index j);
DPoly set_entry(const DPoly& s, Index i, Index j, const DPoly& e);  // e is 1x1

// Drops basis monomials and decision variables with no remaining coefficient.
DPoly compress(const DPoly& s);

// PPoly conveniences, routed through the DPoly algebra.
PPoly ppoly_add(const PPoly& a, const PPoly& b);
PPoly ppoly_scale(const PPoly& a, double f);
PPoly ppoly_mul(const PPoly& a, const PPoly& b);
PPoly ppoly_pow(const PPoly& a, Degree e);  // scalar base
PPoly ppoly_transpose(const PPoly& a);

// --- text form --------------------------------------------------------------

// Round-trippable plain-text form; see dpoly_text.cpp for the grammar.
std::string to_text(const DPoly& s);
DPoly dpoly_from_text(const std::string& text);

// Canonical rendering of one scalar polynomial entry, e.g.
// "1 - 0.5*d1*x1^2 + 2*x2".
std::string entry_text(const DPoly& s, Index i, Index j);
std::string entry_text(const PPoly& p, Index i = 0, Index j = 0);

}  // namespace sosforge
