// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "invpair/contour.hpp"

namespace invpair
{

// Directional derivative of (X, S) -> P(X, S).
Matrix frechet_apply(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                     const Matrix &dX, const Matrix &dS);

struct NewtonCorrection
{
  Matrix dX;
  Matrix dS;
  Index rank = 0;          // numerical rank of the Jacobian
  double residual = 0.0;   // residual of the linear solve
  bool full_rank = true;   // Jacobian has full row rank
};

// Minimum-norm solution of DP(dX, dS) = -P(X, S).
NewtonCorrection newton_correction(const MatrixPolynomial &P, const Matrix &X, const Matrix &S);

// p(t) = (1-t)^2 alpha + t^4 theta + t^6 phi + t^2 (1-t) beta + t^3 (1-t) gamma + t^5 eta.
// For solvents gamma = eta = phi = 0.
struct StepPolynomial
{
  double alpha = 0, beta = 0, gamma = 0, theta = 0, eta = 0, phi = 0;

  // Ascending monomial coefficients c_0..c_6.
  std::array<double, 7> coefficients() const;
  double operator()(double t) const;
};

// Circle centered at trace(S)/k whose radius is twice ||S - cI||_2.
Contour default_line_search_contour(const Matrix &S, int nodes = Contour::kDefaultNodes);

StepPolynomial line_search_poly(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                                const Matrix &dX, const Matrix &dS, const Contour &c);

StepPolynomial solvent_line_search_poly(const MatrixPolynomial &P, const Matrix &S,
                                        const Matrix &dS, const Contour &c);

// Minimizer of p over the real critical points in [0, 2] together with t = 1
// and t = 2; ties go to t = 1.
double minimize_step(const StepPolynomial &poly);

struct RefineOptions
{
  double tol = 1e-12;
  int maxit = 500;
  bool line_search = true;
  std::optional<Contour> contour;   // used while it encloses eig(S)
};

struct RefinementReport
{
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> step_lengths;
  bool converged = false;
  double wall_time = 0.0;
  std::vector<std::string> warnings;
};

struct PairRefinement
{
  InvariantPair pair;
  RefinementReport report;
};

struct SolventRefinement
{
  Matrix S;
  double residual = 0.0;   // ||P(S)||_F
  RefinementReport report;
};

PairRefinement refine_pair(const MatrixPolynomial &P, const Matrix &X0, const Matrix &S0,
                           const RefineOptions &opts = {});

// Residuals are ||P(S)||_F / sqrt(n), the pair residual with X = I.
SolventRefinement refine_solvent(const MatrixPolynomial &P, const Matrix &S0,
                                 const RefineOptions &opts = {});

}  // namespace invpair
