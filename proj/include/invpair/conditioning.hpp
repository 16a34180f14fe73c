// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "invpair/matpoly.hpp"

namespace invpair
{

// Nonnegative weights alpha_0..alpha_l on the coefficient perturbations.
// alpha_i = 0 keeps A_i unperturbed.
class WeightVector
{
public:
  explicit WeightVector(std::vector<double> alphas);

  // alpha_i = ||A_i||_F.
  static WeightVector from_norms(const MatrixPolynomial &P);

  const std::vector<double> &alphas() const noexcept { return alphas_; }
  double operator[](std::size_t i) const { return alphas_.at(i); }
  std::size_t size() const noexcept { return alphas_.size(); }
  WeightVector scaled(double s) const;

private:
  std::vector<double> alphas_;
};

// [B_X B_S] with B_X = sum_j (S^j)^T kron A_j and
// B_S = sum_j sum_{i<j} (S^{j-i-1})^T kron A_j X S^i.
Matrix pair_jacobian(const MatrixPolynomial &P, const Matrix &X, const Matrix &S);
Matrix pair_jacobian_X(const MatrixPolynomial &P, const Matrix &S);
Matrix pair_jacobian_S(const MatrixPolynomial &P, const Matrix &X, const Matrix &S);

// B_A = [alpha_l (X S^l)^T kron I ... alpha_0 X^T kron I]; blocks whose weight
// is zero are left out.
Matrix perturbation_matrix(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                           const WeightVector &w);

// Solvent derivative sum_j sum_{i<j} (S^{j-i-1})^T kron A_j S^i.
Matrix solvent_jacobian(const MatrixPolynomial &P, const Matrix &S);

struct ConditionNumber
{
  double value = 0.0;
  bool full_rank = true;   // false: the derivative is singular, pseudoinverse used
};

ConditionNumber pair_condition_number(const MatrixPolynomial &P, const Matrix &X,
                                      const Matrix &S, const WeightVector &w);

ConditionNumber solvent_condition_number(const MatrixPolynomial &P, const Matrix &S,
                                         const WeightVector &w);

struct BackwardErrorReport
{
  std::optional<double> eta;   // absent when H is rank deficient
  double lower = 0.0;
  double upper = 0.0;          // +inf when the bound denominator vanishes
};

BackwardErrorReport pair_backward_error(const MatrixPolynomial &P, const Matrix &X,
                                        const Matrix &S, const WeightVector &w);

BackwardErrorReport solvent_backward_error(const MatrixPolynomial &P, const Matrix &T,
                                           const WeightVector &w);

}  // namespace invpair
