// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "invpair/types.hpp"

namespace invpair
{

inline constexpr std::uint64_t kDefaultSeed = 20140301;

/**
 * Dense complex matrix polynomial P(z) = A_0 + A_1 z + ... + A_l z^l.
 *
 * Construction validates the shape of every coefficient, rejects a zero
 * leading coefficient and checks regularity (det P not identically zero) at a
 * seeded random sample point. Instances are immutable.
 */
class MatrixPolynomial
{
public:
  explicit MatrixPolynomial(std::vector<Matrix> coeffs,
                            std::uint64_t regularity_seed = kDefaultSeed);

  Index size() const noexcept { return n_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const Matrix &coeff(int j) const { return coeffs_.at(static_cast<std::size_t>(j)); }
  std::span<const Matrix> coeffs() const noexcept { return coeffs_; }

  Matrix operator()(Complex z) const;

private:
  Index n_ = 0;
  std::vector<Matrix> coeffs_;
};

/// Pair (X, S) with X of size n x k and S of size k x k.
class InvariantPair
{
public:
  InvariantPair(Matrix X, Matrix S);

  const Matrix &X() const noexcept { return X_; }
  const Matrix &S() const noexcept { return S_; }
  Index k() const noexcept { return S_.rows(); }
  Index n() const noexcept { return X_.rows(); }

private:
  Matrix X_;
  Matrix S_;
};

struct Eigenpair
{
  Complex value;
  Vector vector;
};

// Horner evaluation of P(z).
Matrix eval_scalar(const MatrixPolynomial &P, Complex z);

// P'(z) = sum_{j>=1} j A_j z^{j-1}.
Matrix eval_derivative(const MatrixPolynomial &P, Complex z);

// P(X, S) = sum_j A_j X S^j.
Matrix eval_pair(const MatrixPolynomial &P, const Matrix &X, const Matrix &S);
Matrix eval_pair(const MatrixPolynomial &P, const InvariantPair &pair);

// Relative residual ||P(X,S)||_F / ||X||_F.
double relative_residual(const MatrixPolynomial &P, const Matrix &X, const Matrix &S);

// S^0 .. S^p.
std::vector<Matrix> matrix_powers(const Matrix &S, int p);

// Block companion matrix of the monic normalization A_l^{-1} P(z); its
// eigenvalues are the finite eigenvalues of P. Throws SingularMatrixError when
// A_l is numerically rank deficient.
Matrix companion_linearization(const MatrixPolynomial &P);

// Eigenpairs of P from the companion matrix; eigenvectors are the leading
// n-block of the companion eigenvectors, normalized to unit 2-norm. Sorted by
// real part, then imaginary part.
std::vector<Eigenpair> polynomial_eigenpairs(const MatrixPolynomial &P);

// Smallest m <= m_max for which [X S^{m-1}; ...; X S; X] has full column
// rank, or nullopt if none does.
std::optional<int> minimality_index(const InvariantPair &pair, int m_max);

}  // namespace invpair
