#pragma once

#include "sosforge/dpoly.hpp"

namespace sosforge {

// Baseline representation that stores decision variables inside the monomial
// basis instead of in coefficient rows. An affine DPoly with q decision
// variables and n monomials flattens to a joint basis of (q+1)*n rows, and
// every operation pays for sorting that joint basis; this type exists so the
// cost gap against DPoly can be measured and tested.
struct FlatPoly {
  Index m1 = 1;
  Index m2 = 1;
  VarSet vars;                        // joint variable set
  std::vector<std::uint8_t> is_dvar;  // parallel to vars.names
  DegreeMatrix basis;                 // canonical, over vars
  SparseMat<double> coeff;            // m1 x m2*basis.nmon()

  Index nmon() const { return basis.nmon(); }
};

FlatPoly flatten(const DPoly& s);

FlatPoly flat_add(const FlatPoly& a, const FlatPoly& b);

// p must not mention any variable tagged as a decision variable in f.
FlatPoly flat_mul(const FlatPoly& f, const PPoly& p, Side side = Side::Right);

// v must not be a decision variable.
FlatPoly flat_diff(const FlatPoly& f, const std::string& v);

Eigen::MatrixXd eval(const FlatPoly& f, const PointMap& pt);

void check_valid(const FlatPoly& f);

}  // namespace sosforge
