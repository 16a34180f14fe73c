// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "invpair/types.hpp"

// Dense helpers shared by all modules: rank decisions, Kronecker products,
// minimum-norm solves, scalar polynomial roots and eigenvalue clustering.

namespace invpair
{

// Repo-wide rank threshold: max(rows, cols) * eps * sigma_max.
double rank_tolerance(Index rows, Index cols, double sigma_max);

Eigen::VectorXd singular_values(const Matrix &A);

// Number of singular values above rank_tolerance.
Index numerical_rank(const Matrix &A);

// sigma_max / sigma_min; +inf for a numerically singular matrix.
double condition_number(const Matrix &A);

double spectral_norm(const Matrix &A);

Matrix kron(const Matrix &A, const Matrix &B);

// Column-major stacking and its inverse.
Vector vec(const Matrix &A);
Matrix unvec(const Vector &v, Index rows, Index cols);

struct LeastSquaresSolution
{
  Matrix x;                 // minimum-norm least-squares solution
  Index rank = 0;           // numerical rank of the system matrix
  double residual = 0.0;    // ||A x - b||_F
};

// Minimum-norm least-squares solve through a thresholded SVD.
LeastSquaresSolution min_norm_solve(const Matrix &A, const Matrix &B);

// Roots of c[0] + c[1] z + ... + c[d] z^d. Leading coefficients that vanish
// relative to the largest one are dropped first.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

Complex polyval(std::span<const Complex> coeffs, Complex z);

struct EigenCluster
{
  Complex value;       // centroid of the members
  int multiplicity;    // number of members
  double spread;       // max distance of a member from the centroid
};

// Groups eigenvalues that belong to the same (possibly defective) multiple
// eigenvalue. A cluster of size m is accepted while every member lies within
// max(base_tol, (1e-11)^(1/m)) * max(1, |centroid|) of its centroid. Output is
// sorted by real part, then imaginary part.
std::vector<EigenCluster> cluster_eigenvalues(std::span<const Complex> values,
                                              double base_tol = 1e-6);

std::vector<Complex> eigenvalues(const Matrix &A);

// Complex standard normal entries.
Matrix random_matrix(Index rows, Index cols, std::mt19937_64 &rng);

}  // namespace invpair
