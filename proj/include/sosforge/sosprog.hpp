#pragma once

#include <Eigen/Dense>

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sosforge/dpoly.hpp"

namespace sosforge {

enum class QuadOption { None, Sym, Pos };

// One registered scalar decision variable. Variables created against a PSD
// block carry their (row, col) position, row <= col.
struct DecVarInfo {
  std::string name;
  Index block = -1;  // PSD block id, -1 for a free variable
  Index r = -1;
  Index c = -1;
};

// A feasibility/optimization program over polynomial equality constraints
// whose decision variables may be tied to PSD cone blocks.
struct SosProgram {
  VarSet ivars;
  std::vector<DecVarInfo> registry;  // creation order
  std::unordered_map<std::string, Index> by_name;
  std::vector<Index> psd_sides;
  std::vector<DPoly> equalities;  // each constrained to the zero polynomial
  std::vector<std::pair<std::string, double>> objective;
  bool maximize = false;
  std::vector<std::string> warnings;
  Index name_counter = 0;
};

void declare_ivars(SosProgram& prog, const std::vector<std::string>& names);

// Scalar free decision variable under a caller-chosen name.
DPoly declare_decvar(SosProgram& prog, const std::string& name);

// Grid of quadratic-form decision polynomials. Cell (i,j) is
//   (I_{m_i} (x) Z1_i)' Q_{i,j} (I_{n_j} (x) Z2_j)
// over a fresh coefficient matrix Q. With QuadOption::Pos the composite Q
// over all cells is one PSD block; Sym ties Q_{i,j} = Q_{j,i}' without the
// cone; both require the grid to be square with matching cell sizes.
std::vector<std::vector<DPoly>> quadvar(SosProgram& prog, const std::vector<DegreeMatrix>& Z1,
                                        const std::vector<DegreeMatrix>& Z2,
                                        const std::vector<Index>& mdims,
                                        const std::vector<Index>& ndims, QuadOption opt);

// Scalar sum-of-squares variable Z' Q Z with Q PSD.
DPoly sosvar(SosProgram& prog, const DegreeMatrix& Z);

// m x n matrix of free polynomials with monomials from Z; Sym requires m == n
// and ties entry (i,j) to entry (j,i).
DPoly polymatrixvar(SosProgram& prog, const DegreeMatrix& Z, Index m, Index n,
                    QuadOption opt = QuadOption::None);

// Constrains every entry of D to the zero polynomial.
void eq_constraint(SosProgram& prog, const DPoly& d);

// Constrains the scalar D to equal a fresh sum-of-squares variable. The Gram
// basis is the full basis of degree ceil(deg(D)/2) over the variables present
// in D; odd-degree D records a structural-infeasibility warning but still
// emits the constraint.
void sos_ineq(SosProgram& prog, const DPoly& d);

// Matrix counterpart: D (square) minus a PSD-quadratic Gram matrix variable.
void matrix_ineq(SosProgram& prog, const DPoly& d);

void set_objective(SosProgram& prog, const std::vector<std::pair<std::string, double>>& weights,
                   bool maximize);

// Standard-form conic data: min c'x s.t. Ax = b, x = (free part, stacked
// column-major vectorizations of the PSD blocks).
//
// Vector layout: free variables first in creation order, then each PSD block
// in creation order as a full side^2 column-major slab; entry (r,c) of block
// with offset o sits at o + c*side + r. A coefficient w on a PSD-tied
// variable at (r,c), r < c, splits as w/2 over the two mirrored slots so the
// slab coefficients form a symmetric matrix; varmap points at the upper slot.
struct SdpProblem {
  Index nfree = 0;
  std::vector<Index> blocks;
  SparseMat<double> A;  // m x nvec()
  Eigen::VectorXd b;
  Eigen::VectorXd c;  // always minimization form
  bool maximize = false;
  bool trivially_infeasible = false;  // a constant-only row demanded b != 0
  std::unordered_map<std::string, Index> varmap;

  Index nvec() const {
    Index n = nfree;
    for (Index s : blocks) n += s * s;
    return n;
  }
};

SdpProblem assemble(const SosProgram& prog);

}  // namespace sosforge
