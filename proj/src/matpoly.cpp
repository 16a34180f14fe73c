// SPDX-License-Identifier: Apache-2.0

#include "invpair/matpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "invpair/error.hpp"
#include "invpair/linalg.hpp"

namespace invpair
{

MatrixPolynomial::MatrixPolynomial(std::vector<Matrix> coeffs, std::uint64_t regularity_seed)
  : coeffs_(std::move(coeffs))
{
  if (coeffs_.size() < 2)
  {
    throw InvalidArgument("matrix polynomial needs degree >= 1 (at least two coefficients)");
  }
  n_ = coeffs_.front().rows();
  if (n_ == 0)
  {
    throw DimensionError("matrix polynomial coefficients must be nonempty");
  }
  for (std::size_t j = 0; j < coeffs_.size(); j++)
  {
    if (coeffs_[j].rows() != n_ || coeffs_[j].cols() != n_)
    {
      throw DimensionError("coefficient A_" + std::to_string(j) + " is " +
                           std::to_string(coeffs_[j].rows()) + "x" +
                           std::to_string(coeffs_[j].cols()) + ", expected " +
                           std::to_string(n_) + "x" + std::to_string(n_));
    }
  }
  if (coeffs_.back().isZero(0.0))
  {
    throw InvalidArgument("leading coefficient A_" + std::to_string(coeffs_.size() - 1) +
                          " is the zero matrix");
  }

  // det P(z_r) != 0 at one random point on the unit circle.
  std::mt19937_64 rng(regularity_seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Complex zr = std::polar(1.0, angle(rng));
  const Matrix Pz = eval_scalar(*this, zr);
  if (numerical_rank(Pz) < n_)
  {
    throw InvalidArgument("matrix polynomial appears singular (det P(z) vanishes at a random point)");
  }
}

Matrix MatrixPolynomial::operator()(Complex z) const
{
  return eval_scalar(*this, z);
}

InvariantPair::InvariantPair(Matrix X, Matrix S) : X_(std::move(X)), S_(std::move(S))
{
  if (S_.rows() != S_.cols())
  {
    throw DimensionError("invariant pair: S must be square");
  }
  if (X_.cols() != S_.rows())
  {
    throw DimensionError("invariant pair: X has " + std::to_string(X_.cols()) +
                         " columns but S is " + std::to_string(S_.rows()) + "x" +
                         std::to_string(S_.cols()));
  }
  if (S_.rows() < 1)
  {
    throw DimensionError("invariant pair: k must be positive");
  }
  if (X_.isZero(0.0))
  {
    throw InvalidArgument("invariant pair: X must not be the zero matrix");
  }
}

Matrix eval_scalar(const MatrixPolynomial &P, Complex z)
{
  const auto A = P.coeffs();
  Matrix acc = A.back();
  for (int j = P.degree() - 1; j >= 0; j--)
  {
    acc = acc * z + A[static_cast<std::size_t>(j)];
  }
  return acc;
}

Matrix eval_derivative(const MatrixPolynomial &P, Complex z)
{
  const auto A = P.coeffs();
  const int l = P.degree();
  Matrix acc = static_cast<double>(l) * A.back();
  for (int j = l - 1; j >= 1; j--)
  {
    acc = acc * z + static_cast<double>(j) * A[static_cast<std::size_t>(j)];
  }
  return acc;
}

std::vector<Matrix> matrix_powers(const Matrix &S, int p)
{
  std::vector<Matrix> pw;
  pw.reserve(static_cast<std::size_t>(p) + 1);
  pw.push_back(Matrix::Identity(S.rows(), S.cols()));
  for (int j = 1; j <= p; j++)
  {
    pw.push_back(pw.back() * S);
  }
  return pw;
}

Matrix eval_pair(const MatrixPolynomial &P, const Matrix &X, const Matrix &S)
{
  if (X.rows() != P.size())
  {
    throw DimensionError("eval_pair: X has " + std::to_string(X.rows()) +
                         " rows, polynomial size is " + std::to_string(P.size()));
  }
  if (S.rows() != S.cols() || X.cols() != S.rows())
  {
    throw DimensionError("eval_pair: X columns and S size disagree");
  }
  const auto A = P.coeffs();
  Matrix XSj = X;
  Matrix R = A[0] * X;
  for (int j = 1; j <= P.degree(); j++)
  {
    XSj = XSj * S;
    R += A[static_cast<std::size_t>(j)] * XSj;
  }
  return R;
}

Matrix eval_pair(const MatrixPolynomial &P, const InvariantPair &pair)
{
  if (pair.k() > static_cast<Index>(P.degree()) * P.size())
  {
    throw DimensionError("eval_pair: pair size k exceeds degree * n");
  }
  return eval_pair(P, pair.X(), pair.S());
}

double relative_residual(const MatrixPolynomial &P, const Matrix &X, const Matrix &S)
{
  const double xn = X.norm();
  const double rn = eval_pair(P, X, S).norm();
  return xn > 0.0 ? rn / xn : std::numeric_limits<double>::infinity();
}

Matrix companion_linearization(const MatrixPolynomial &P)
{
  const Index n = P.size();
  const int l = P.degree();
  const Matrix &Al = P.coeff(l);
  const Index rank = numerical_rank(Al);
  if (rank < n)
  {
    throw SingularMatrixError("companion_linearization: leading coefficient is singular (rank " +
                                  std::to_string(rank) + " < " + std::to_string(n) + ")",
                              condition_number(Al));
  }
  Eigen::PartialPivLU<Matrix> lu(Al);
  Matrix C = Matrix::Zero(l * n, l * n);
  for (int b = 0; b + 1 < l; b++)
  {
    C.block(b * n, (b + 1) * n, n, n).setIdentity();
  }
  for (int j = 0; j < l; j++)
  {
    C.block((l - 1) * n, j * n, n, n) = -lu.solve(P.coeff(j));
  }
  return C;
}

std::vector<Eigenpair> polynomial_eigenpairs(const MatrixPolynomial &P)
{
  const Matrix C = companion_linearization(P);
  Eigen::ComplexEigenSolver<Matrix> es(C, true);
  if (es.info() != Eigen::Success)
  {
    throw Error("polynomial_eigenpairs: eigenvalue iteration did not converge");
  }
  const Index n = P.size();
  std::vector<Eigenpair> out;
  out.reserve(static_cast<std::size_t>(C.rows()));
  for (Index i = 0; i < C.rows(); i++)
  {
    Vector x = es.eigenvectors().col(i).head(n);
    const double nx = x.norm();
    if (nx > 0.0)
    {
      x /= nx;
    }
    // Fix the phase so the largest entry is real and positive.
    Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (std::abs(x(imax)) > 0.0)
    {
      x *= std::abs(x(imax)) / x(imax);
    }
    out.push_back({es.eigenvalues()(i), std::move(x)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Eigenpair &a, const Eigenpair &b)
                   {
                     const double tol = 1e-10 * std::max({1.0, std::abs(a.value), std::abs(b.value)});
                     if (std::abs(a.value.real() - b.value.real()) > tol)
                     {
                       return a.value.real() < b.value.real();
                     }
                     return a.value.imag() < b.value.imag() - tol;
                   });
  return out;
}

std::optional<int> minimality_index(const InvariantPair &pair, int m_max)
{
  if (m_max < 1)
  {
    throw InvalidArgument("minimality_index: m_max must be >= 1");
  }
  const Index n = pair.n();
  const Index k = pair.k();
  // Grow the stack downward: V_m = [X S^{m-1}; ...; X].
  Matrix V = pair.X();
  Matrix top = pair.X();
  for (int m = 1; m <= m_max; m++)
  {
    if (m > 1)
    {
      top = top * pair.S();
      Matrix next(V.rows() + n, k);
      next << top, V;
      V = std::move(next);
    }
    if (numerical_rank(V) == k)
    {
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace invpair
