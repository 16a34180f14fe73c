// SPDX-License-Identifier: Apache-2.0

#include "invpair/hankel.hpp"

#include <string>

#include <Eigen/LU>

#include "invpair/error.hpp"

namespace invpair
{

HankelPencil build_hankel(const MomentSequence &moms, int m)
{
  if (m < 1)
  {
    throw InvalidArgument("pencil size must be positive");
  }
  if (moms.mu.size() < 2 * static_cast<std::size_t>(m))
  {
    throw InvalidArgument("Hankel pencil of size " + std::to_string(m) + " needs " +
                          std::to_string(2 * m) + " moments, got " +
                          std::to_string(moms.mu.size()));
  }
  HankelPencil hp{Matrix(m, m), Matrix(m, m), 1};
  for (int i = 0; i < m; i++)
  {
    for (int j = 0; j < m; j++)
    {
      hp.H0(i, j) = moms.mu[static_cast<std::size_t>(i + j)];
      hp.H1(i, j) = moms.mu[static_cast<std::size_t>(i + j + 1)];
    }
  }
  return hp;
}

HankelPencil build_block_hankel(const BlockMomentSequence &moms, int m)
{
  if (m < 1)
  {
    throw InvalidArgument("pencil size must be positive");
  }
  if (moms.M.size() < 2 * static_cast<std::size_t>(m))
  {
    throw InvalidArgument("block Hankel pencil with " + std::to_string(m) +
                          " block rows needs " + std::to_string(2 * m) + " moments, got " +
                          std::to_string(moms.M.size()));
  }
  const Index xi = moms.block_size();
  HankelPencil hp{Matrix(m * xi, m * xi), Matrix(m * xi, m * xi), xi};
  for (int i = 0; i < m; i++)
  {
    for (int j = 0; j < m; j++)
    {
      hp.H0.block(i * xi, j * xi, xi, xi) = moms.M[static_cast<std::size_t>(i + j)];
      hp.H1.block(i * xi, j * xi, xi, xi) = moms.M[static_cast<std::size_t>(i + j + 1)];
    }
  }
  return hp;
}

HankelPencil truncate(const HankelPencil &hp, Index m)
{
  if (m < 1 || m > hp.size())
  {
    throw InvalidArgument("cannot truncate a pencil of size " + std::to_string(hp.size()) +
                          " to " + std::to_string(m));
  }
  return {hp.H0.topLeftCorner(m, m), hp.H1.topLeftCorner(m, m), hp.block_size};
}

Matrix companion_from_pencil(const HankelPencil &hp)
{
  const Index m = hp.size();
  const Index xi = std::min(hp.block_size, m);
  const Index r = numerical_rank(hp.H0);
  if (r < m)
  {
    throw RankDeficientError("H0 is singular: numerical rank " + std::to_string(r) + " < " +
                                 std::to_string(m) + "; truncate the pencil to size " +
                                 std::to_string(r),
                             r, m);
  }
  Matrix C = Matrix::Zero(m, m);
  for (Index j = 0; j + xi < m; j++)
  {
    C(j + xi, j) = 1.0;
  }
  Eigen::PartialPivLU<Matrix> lu(hp.H0);
  C.rightCols(xi) = lu.solve(hp.H1.rightCols(xi));
  return C;
}

std::vector<EigenCluster> pencil_eigenvalues(const HankelPencil &hp)
{
  const auto ev = eigenvalues(companion_from_pencil(hp));
  return cluster_eigenvalues(ev);
}

InvariantPair extract_invariant_pair(const MatrixPolynomial &P, const Contour &c,
                                     const Vector &u, const Vector &v, int m)
{
  if (m < 1)
  {
    throw InvalidArgument("pencil size must be positive");
  }
  const auto moms = scalar_moments(P, c, u, v, 2 * m);
  const Matrix C = companion_from_pencil(build_hankel(moms, m));
  Matrix X(P.size(), m);
  for (int k = 0; k < m; k++)
  {
    X.col(k) = moms.svecs[static_cast<std::size_t>(k)];
  }
  return InvariantPair(std::move(X), C);
}

InvariantPair extract_block_invariant_pair(const MatrixPolynomial &P, const Contour &c,
                                           const Matrix &U, const Matrix &V, int m)
{
  if (m < 1)
  {
    throw InvalidArgument("pencil size must be positive");
  }
  const Index xi = U.cols();
  if (xi < 1)
  {
    throw DimensionError("probe block must have at least one column");
  }
  const int mt = static_cast<int>((m + xi - 1) / xi);
  const auto moms = block_moments(P, c, U, V, 2 * mt);
  const HankelPencil hp = truncate(build_block_hankel(moms, mt), m);
  const Matrix T = companion_from_pencil(hp);
  Matrix Y(P.size(), mt * xi);
  for (int k = 0; k < mt; k++)
  {
    Y.middleCols(k * xi, xi) = moms.Sblocks[static_cast<std::size_t>(k)];
  }
  return InvariantPair(Y.leftCols(m), T);
}

int choose_pencil_size(const MatrixPolynomial &P, const Contour &c, const Vector &u,
                       const Vector &v, int m_max)
{
  if (m_max < 1)
  {
    throw InvalidArgument("m_max must be positive");
  }
  const auto cnt = count_eigenvalues_inside(P, c);
  if (cnt.reliable() && cnt.count > 0 && cnt.count <= m_max)
  {
    return cnt.count;
  }
  const auto moms = scalar_moments(P, c, u, v, 2 * m_max);
  Index best = 0;
  for (int m = 1; m <= m_max; m++)
  {
    const Index r = numerical_rank(build_hankel(moms, m).H0);
    if (r < m)
    {
      break;
    }
    best = r;
  }
  if (best == 0)
  {
    throw RankDeficientError("no eigenvalues detected inside the contour", 0, 1);
  }
  return static_cast<int>(best);
}

}  // namespace invpair
