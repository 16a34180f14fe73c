// SPDX-License-Identifier: Apache-2.0

#include "invpair/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "invpair/error.hpp"

namespace invpair
{

namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

double rank_tolerance(Index rows, Index cols, double sigma_max)
{
  return static_cast<double>(std::max(rows, cols)) * kEps * sigma_max;
}

Eigen::VectorXd singular_values(const Matrix &A)
{
  if (A.size() == 0)
  {
    return Eigen::VectorXd();
  }
  Eigen::BDCSVD<Matrix> svd(A);
  return svd.singularValues();
}

Index numerical_rank(const Matrix &A)
{
  const Eigen::VectorXd sv = singular_values(A);
  if (sv.size() == 0 || sv(0) == 0.0)
  {
    return 0;
  }
  const double tau = rank_tolerance(A.rows(), A.cols(), sv(0));
  return (sv.array() > tau).count();
}

double condition_number(const Matrix &A)
{
  const Eigen::VectorXd sv = singular_values(A);
  if (sv.size() == 0)
  {
    return 0.0;
  }
  const double smin = sv(sv.size() - 1);
  if (smin <= rank_tolerance(A.rows(), A.cols(), sv(0)))
  {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / smin;
}

double spectral_norm(const Matrix &A)
{
  const Eigen::VectorXd sv = singular_values(A);
  return sv.size() == 0 ? 0.0 : sv(0);
}

Matrix kron(const Matrix &A, const Matrix &B)
{
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index j = 0; j < A.cols(); j++)
  {
    for (Index i = 0; i < A.rows(); i++)
    {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

Vector vec(const Matrix &A)
{
  return Eigen::Map<const Vector>(A.data(), A.size());
}

Matrix unvec(const Vector &v, Index rows, Index cols)
{
  if (v.size() != rows * cols)
  {
    throw DimensionError("unvec: vector length does not match the requested shape");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

LeastSquaresSolution min_norm_solve(const Matrix &A, const Matrix &B)
{
  if (A.rows() != B.rows())
  {
    throw DimensionError("min_norm_solve: row count mismatch");
  }
  LeastSquaresSolution out;
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(static_cast<double>(std::max(A.rows(), A.cols())) * kEps);
  out.x = svd.solve(B);
  out.rank = svd.rank();
  out.residual = (A * out.x - B).norm();
  return out;
}

Complex polyval(std::span<const Complex> coeffs, Complex z)
{
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
  {
    acc = acc * z + *it;
  }
  return acc;
}

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs)
{
  double cmax = 0.0;
  for (const auto &c : coeffs)
  {
    cmax = std::max(cmax, std::abs(c));
  }
  if (cmax == 0.0)
  {
    throw InvalidArgument("polynomial_roots: zero polynomial");
  }
  Index deg = static_cast<Index>(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs[deg]) <= kEps * cmax)
  {
    deg--;
  }
  if (deg <= 0)
  {
    return {};
  }
  // Companion matrix of the monic normalization.
  Matrix C = Matrix::Zero(deg, deg);
  for (Index i = 1; i < deg; i++)
  {
    C(i, i - 1) = 1.0;
  }
  for (Index i = 0; i < deg; i++)
  {
    C(i, deg - 1) = -coeffs[i] / coeffs[deg];
  }
  return eigenvalues(C);
}

std::vector<Complex> eigenvalues(const Matrix &A)
{
  if (A.rows() != A.cols())
  {
    throw DimensionError("eigenvalues: matrix is not square");
  }
  if (A.rows() == 0)
  {
    return {};
  }
  Eigen::ComplexEigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success)
  {
    throw Error("eigenvalues: QR iteration did not converge");
  }
  const Vector &ev = es.eigenvalues();
  return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

std::vector<EigenCluster> cluster_eigenvalues(std::span<const Complex> values,
                                              double base_tol)
{
  struct Group
  {
    std::vector<Complex> members;
    Complex centroid;
  };
  auto centroid_of = [](const std::vector<Complex> &m)
  {
    Complex c = 0.0;
    for (const auto &z : m)
    {
      c += z;
    }
    return c / static_cast<double>(m.size());
  };
  auto threshold = [base_tol](std::size_t m, Complex c)
  {
    const double rel = std::max(base_tol, std::pow(1e-11, 1.0 / static_cast<double>(m)));
    return rel * std::max(1.0, std::abs(c));
  };

  // Seed with the first remaining value (in sorted order) and take the largest
  // set of its nearest neighbours whose spread fits the size-dependent
  // threshold. Pairwise merging would miss defective eigenvalues, whose
  // members are farther apart than the two-member threshold allows.
  std::vector<Complex> rest(values.begin(), values.end());
  std::sort(rest.begin(), rest.end(), [](Complex x, Complex y)
            { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
  std::vector<Group> groups;
  while (!rest.empty())
  {
    const Complex seed = rest.front();
    std::vector<std::size_t> order(rest.size());
    for (std::size_t i = 0; i < order.size(); i++)
    {
      order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y)
                     { return std::abs(rest[x] - seed) < std::abs(rest[y] - seed); });
    std::size_t best = 1;
    std::vector<Complex> m;
    for (std::size_t size = 1; size <= order.size(); size++)
    {
      m.push_back(rest[order[size - 1]]);
      const Complex ctr = centroid_of(m);
      double spread = 0.0;
      for (const auto &z : m)
      {
        spread = std::max(spread, std::abs(z - ctr));
      }
      if (spread <= threshold(size, ctr))
      {
        best = size;
      }
    }
    Group g;
    std::vector<bool> take(rest.size(), false);
    for (std::size_t i = 0; i < best; i++)
    {
      take[order[i]] = true;
      g.members.push_back(rest[order[i]]);
    }
    g.centroid = centroid_of(g.members);
    groups.push_back(std::move(g));
    std::vector<Complex> left;
    for (std::size_t i = 0; i < rest.size(); i++)
    {
      if (!take[i])
      {
        left.push_back(rest[i]);
      }
    }
    rest = std::move(left);
  }

  std::vector<EigenCluster> out;
  out.reserve(groups.size());
  for (const auto &g : groups)
  {
    double spread = 0.0;
    for (const auto &z : g.members)
    {
      spread = std::max(spread, std::abs(z - g.centroid));
    }
    out.push_back({g.centroid, static_cast<int>(g.members.size()), spread});
  }
  std::sort(out.begin(), out.end(),
            [](const EigenCluster &x, const EigenCluster &y)
            {
              if (x.value.real() != y.value.real())
              {
                return x.value.real() < y.value.real();
              }
              return x.value.imag() < y.value.imag();
            });
  return out;
}

Matrix random_matrix(Index rows, Index cols, std::mt19937_64 &rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; j++)
  {
    for (Index i = 0; i < rows; i++)
    {
      const double re = normal(rng);
      const double im = normal(rng);
      M(i, j) = Complex(re, im);
    }
  }
  return M;
}

}  // namespace invpair
