// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "invpair/matpoly.hpp"

namespace invpair
{

struct Solvent
{
  Matrix S;
  double residual = 0.0;   // ||P(S)||_F
};

// S = X T X^{-1} for an n x n pair (X, T) with X nonsingular.
Solvent solvent_from_pair(const MatrixPolynomial &P, const InvariantPair &pair);

struct RejectedSubset
{
  std::vector<int> indices;   // zero-based positions in the eigenpair list
  double condition = 0.0;     // condition number of W
};

struct SolventEnumeration
{
  std::vector<Solvent> solvents;
  std::vector<std::vector<int>> subsets;   // eigenpairs used for each solvent
  std::vector<RejectedSubset> rejected;
};

inline constexpr std::size_t kMaxSubsets = 10000;

// Every n-subset of the eigenpairs whose eigenvectors are independent gives
// S = W diag(mu) W^{-1}. Subsets are visited in lexicographic order.
SolventEnumeration enumerate_solvents(const MatrixPolynomial &P,
                                      const std::vector<Eigenpair> &eigpairs);

enum class FamilyKind
{
  none,
  unique,
  affine_family
};

const char *to_string(FamilyKind k);

// Solutions base + sum_i c_i directions[i] of T(S) = 0 with S upper triangular.
struct TriangularSolventFamily
{
  FamilyKind kind = FamilyKind::none;
  Matrix base;
  std::vector<Matrix> directions;
  std::string reason;   // why the branch has no solution
};

struct TriangularBranch
{
  std::vector<Complex> diagonal;
  TriangularSolventFamily family;
};

inline constexpr std::size_t kMaxBranches = 1000;

// Solves T(S) = 0 over upper triangular S for every choice of diagonal entries
// among the distinct roots of the diagonal polynomials T_ii.
std::vector<TriangularBranch> triangular_solvent_solve(const MatrixPolynomial &T);

// Same, for one prescribed diagonal.
TriangularSolventFamily triangular_solvent_branch(const MatrixPolynomial &T,
                                                  const std::vector<Complex> &diagonal);

// Distinct roots of T_ii, multiple roots polished.
std::vector<Complex> diagonal_roots(const MatrixPolynomial &T, Index i);

// Y = M^{-1} [I; S_t; ...; S_t^{l-1}], S = Y_1 S_t Y_1^{-1}.
Solvent solvent_from_triangular(const MatrixPolynomial &P, const Matrix &M, const Matrix &St,
                                double tol = 1e-8);

struct SolventCheck
{
  double residual = 0.0;                  // ||P(S)||_F / ||S||_F
  std::vector<Complex> eigenvalues;
  std::vector<double> eigenpair_residuals;   // ||P(mu) w|| / ||w||
  bool certified = false;
};

SolventCheck verify_solvent(const MatrixPolynomial &P, const Matrix &S, double tol);

}  // namespace invpair
