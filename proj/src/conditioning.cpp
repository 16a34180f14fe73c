// SPDX-License-Identifier: Apache-2.0

#include "invpair/conditioning.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "invpair/error.hpp"
#include "invpair/linalg.hpp"

namespace invpair
{

namespace
{

void check_weights(const MatrixPolynomial &P, const WeightVector &w)
{
  if (w.size() != static_cast<std::size_t>(P.degree()) + 1)
  {
    throw DimensionError("weight vector has " + std::to_string(w.size()) +
                         " entries, polynomial has " + std::to_string(P.degree() + 1) +
                         " coefficients");
  }
  bool any = false;
  for (double a : w.alphas())
  {
    any = any || a > 0.0;
  }
  if (!any)
  {
    throw InvalidArgument("all weights are zero; the condition number is undefined");
  }
}

void check_pair(const MatrixPolynomial &P, const Matrix &X, const Matrix &S)
{
  if (X.rows() != P.size() || S.rows() != S.cols() || X.cols() != S.rows())
  {
    throw DimensionError("pair dimensions do not match the polynomial");
  }
}

Matrix kron_identity_left(const Matrix &M, Index n)
{
  return kron(M.transpose(), Matrix::Identity(n, n));
}

}  // namespace

WeightVector::WeightVector(std::vector<double> alphas) : alphas_(std::move(alphas))
{
  for (double a : alphas_)
  {
    if (!(a >= 0.0) || !std::isfinite(a))
    {
      throw InvalidArgument("weights must be finite and nonnegative");
    }
  }
}

WeightVector WeightVector::from_norms(const MatrixPolynomial &P)
{
  std::vector<double> a;
  for (const auto &A : P.coeffs())
  {
    a.push_back(A.norm());
  }
  return WeightVector(std::move(a));
}

WeightVector WeightVector::scaled(double s) const
{
  std::vector<double> a = alphas_;
  for (double &x : a)
  {
    x *= s;
  }
  return WeightVector(std::move(a));
}

Matrix pair_jacobian_X(const MatrixPolynomial &P, const Matrix &S)
{
  const auto pw = matrix_powers(S, P.degree());
  const Index n = P.size(), k = S.rows();
  Matrix BX = Matrix::Zero(n * k, n * k);
  for (int j = 0; j <= P.degree(); j++)
  {
    BX += kron(pw[static_cast<std::size_t>(j)].transpose(), P.coeff(j));
  }
  return BX;
}

Matrix pair_jacobian_S(const MatrixPolynomial &P, const Matrix &X, const Matrix &S)
{
  const auto pw = matrix_powers(S, P.degree());
  const Index n = P.size(), k = S.rows();
  Matrix BS = Matrix::Zero(n * k, k * k);
  for (int j = 1; j <= P.degree(); j++)
  {
    for (int i = 0; i < j; i++)
    {
      BS += kron(pw[static_cast<std::size_t>(j - i - 1)].transpose(),
                 P.coeff(j) * X * pw[static_cast<std::size_t>(i)]);
    }
  }
  return BS;
}

Matrix pair_jacobian(const MatrixPolynomial &P, const Matrix &X, const Matrix &S)
{
  check_pair(P, X, S);
  const Index n = P.size(), k = S.rows();
  Matrix J(n * k, n * k + k * k);
  J << pair_jacobian_X(P, S), pair_jacobian_S(P, X, S);
  return J;
}

Matrix perturbation_matrix(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                           const WeightVector &w)
{
  check_pair(P, X, S);
  check_weights(P, w);
  const Index n = P.size(), k = S.rows();
  const auto pw = matrix_powers(S, P.degree());
  Index blocks = 0;
  for (double a : w.alphas())
  {
    blocks += a > 0.0 ? 1 : 0;
  }
  Matrix BA(n * k, blocks * n * n);
  Index col = 0;
  for (int i = P.degree(); i >= 0; i--)
  {
    const double a = w[static_cast<std::size_t>(i)];
    if (a == 0.0)
    {
      continue;
    }
    BA.middleCols(col, n * n) = a * kron_identity_left(X * pw[static_cast<std::size_t>(i)], n);
    col += n * n;
  }
  return BA;
}

Matrix solvent_jacobian(const MatrixPolynomial &P, const Matrix &S)
{
  if (S.rows() != P.size() || S.cols() != P.size())
  {
    throw DimensionError("solvent must be n x n");
  }
  return pair_jacobian_S(P, Matrix::Identity(P.size(), P.size()), S);
}

ConditionNumber pair_condition_number(const MatrixPolynomial &P, const Matrix &X,
                                      const Matrix &S, const WeightVector &w)
{
  const Matrix J = pair_jacobian(P, X, S);
  const Matrix BA = perturbation_matrix(P, X, S, w);
  const auto sol = min_norm_solve(J, BA);
  Matrix XS(X.rows() + S.rows(), S.cols());
  XS << X, S;
  return {spectral_norm(sol.x) / XS.norm(), sol.rank == J.rows()};
}

ConditionNumber solvent_condition_number(const MatrixPolynomial &P, const Matrix &S,
                                         const WeightVector &w)
{
  const Index n = P.size();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix J = solvent_jacobian(P, S);
  const Matrix BA = perturbation_matrix(P, I, S, w);
  const auto sol = min_norm_solve(J, BA);
  const double sn = S.norm();
  const double value = sn > 0.0 ? spectral_norm(sol.x) / sn : std::numeric_limits<double>::infinity();
  return {value, sol.rank == J.rows()};
}

namespace
{

// Shared by pairs and solvents (X = I).
// For solvents the i = 0 term of the lower bound uses ||I||_2 = 1 rather than
// ||I||_F; the bound stays valid since ||T^i||_2 <= ||T^i||_F.
BackwardErrorReport backward_error(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                                   const WeightVector &w, bool solvent)
{
  const Matrix R = eval_pair(P, X, S);
  const double rn = R.norm();
  const Index k = S.rows();
  const auto pw = matrix_powers(S, P.degree());

  double lower_den = 0.0, upper_den = 0.0;
  for (int i = 0; i <= P.degree(); i++)
  {
    const double a = w[static_cast<std::size_t>(i)];
    const Matrix XSi = X * pw[static_cast<std::size_t>(i)];
    const double f = (solvent && i == 0) ? 1.0 : XSi.norm();
    lower_den += a * a * f * f;
    // k-th singular value; zero when X S^i has fewer than k rows.
    double smin = 0.0;
    if (XSi.rows() >= k)
    {
      const auto sv = singular_values(XSi);
      smin = sv(k - 1);
    }
    upper_den += a * a * smin * smin;
  }
  const double inf = std::numeric_limits<double>::infinity();
  BackwardErrorReport out;
  out.lower = lower_den > 0.0 ? rn / std::sqrt(lower_den) : (rn == 0.0 ? 0.0 : inf);
  out.upper = upper_den > 0.0 ? rn / std::sqrt(upper_den) : (rn == 0.0 ? 0.0 : inf);

  const Matrix H = perturbation_matrix(P, X, S, w);
  const auto sol = min_norm_solve(H, -vec(R));
  if (sol.rank == H.rows())
  {
    out.eta = sol.x.norm();
  }
  return out;
}

}  // namespace

BackwardErrorReport pair_backward_error(const MatrixPolynomial &P, const Matrix &X,
                                        const Matrix &S, const WeightVector &w)
{
  check_pair(P, X, S);
  check_weights(P, w);
  return backward_error(P, X, S, w, false);
}

BackwardErrorReport solvent_backward_error(const MatrixPolynomial &P, const Matrix &T,
                                           const WeightVector &w)
{
  if (T.rows() != P.size() || T.cols() != P.size())
  {
    throw DimensionError("solvent must be n x n");
  }
  check_weights(P, w);
  return backward_error(P, Matrix::Identity(P.size(), P.size()), T, w, true);
}

}  // namespace invpair
