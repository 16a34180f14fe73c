// SPDX-License-Identifier: Apache-2.0

#include "invpair/contour.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "invpair/error.hpp"
#include "invpair/linalg.hpp"

namespace invpair
{

namespace
{

std::string node_message(const Contour &c, int j, double cond)
{
  std::ostringstream os;
  const Complex z = c.node(j);
  os << "eigenvalue on or near contour: P(z) at node " << j << " (z = " << z.real()
     << (z.imag() < 0 ? "" : "+") << z.imag() << "i) has condition estimate " << cond;
  return os.str();
}

// LU of P at node j, rejecting nodes where P is numerically singular.
Eigen::PartialPivLU<Matrix> factor_node(const MatrixPolynomial &P, const Contour &c, int j)
{
  Eigen::PartialPivLU<Matrix> lu(eval_scalar(P, c.node(j)));
  const double rc = lu.rcond();
  if (!(rc * kNearContourCondition > 1.0))
  {
    throw NearContourError(node_message(c, j, rc > 0.0 ? 1.0 / rc : INFINITY), j);
  }
  return lu;
}

void check_probe_block(const Matrix &W, Index n, const char *name)
{
  if (W.rows() != n)
  {
    throw DimensionError(std::string(name) + " has " + std::to_string(W.rows()) +
                         " rows, expected " + std::to_string(n));
  }
  if (W.cols() < 1)
  {
    throw DimensionError(std::string(name) + " has no columns");
  }
  if (W.isZero(0.0))
  {
    throw InvalidArgument(std::string(name) + " must be nonzero");
  }
  const Index r = numerical_rank(W);
  if (r < W.cols())
  {
    throw RankDeficientError(std::string(name) + " columns are linearly dependent (rank " +
                                 std::to_string(r) + " of " + std::to_string(W.cols()) + ")",
                             r, W.cols());
  }
}

// S_k for k < count, accumulated node by node in a fixed order.
std::vector<Matrix> moment_blocks(const MatrixPolynomial &P, const Contour &c, const Matrix &V,
                                  int count)
{
  std::vector<Matrix> S(static_cast<std::size_t>(count),
                        Matrix::Zero(V.rows(), V.cols()));
  for (int j = 0; j < c.nodes(); j++)
  {
    const auto lu = factor_node(P, c, j);
    const Complex z = c.node(j);
    Matrix term = lu.solve(V) * c.weight(j);
    for (int k = 0; k < count; k++)
    {
      S[static_cast<std::size_t>(k)] += term;
      term *= z;
    }
  }
  return S;
}

}  // namespace

Contour::Contour(Complex center, double radius, int nodes)
  : center_(center), radius_(radius), nodes_(nodes)
{
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag()))
  {
    throw InvalidArgument("contour center must be finite");
  }
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw InvalidArgument("contour radius must be positive and finite");
  }
  if (nodes < 4)
  {
    throw InvalidArgument("contour needs at least 4 quadrature nodes");
  }
}

Complex Contour::node(int j) const
{
  return center_ + weight(j) * static_cast<double>(nodes_);
}

Complex Contour::weight(int j) const
{
  const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes_);
  return std::polar(radius_, t) / static_cast<double>(nodes_);
}

MomentSequence scalar_moments(const MatrixPolynomial &P, const Contour &c, const Vector &u,
                              const Vector &v, int count)
{
  if (count < 1)
  {
    throw InvalidArgument("moment count must be positive");
  }
  check_probe_block(u, P.size(), "probe u");
  check_probe_block(v, P.size(), "probe v");
  const auto S = moment_blocks(P, c, v, count);
  MomentSequence out{u, v, {}, {}, c};
  out.mu.reserve(S.size());
  out.svecs.reserve(S.size());
  for (const auto &s : S)
  {
    out.svecs.emplace_back(s.col(0));
    out.mu.push_back(u.dot(out.svecs.back()));
  }
  return out;
}

BlockMomentSequence block_moments(const MatrixPolynomial &P, const Contour &c, const Matrix &U,
                                  const Matrix &V, int count)
{
  if (count < 1)
  {
    throw InvalidArgument("moment count must be positive");
  }
  check_probe_block(U, P.size(), "probe block U");
  check_probe_block(V, P.size(), "probe block V");
  if (U.cols() != V.cols())
  {
    throw DimensionError("probe blocks U and V must have the same number of columns");
  }
  BlockMomentSequence out{U, V, {}, moment_blocks(P, c, V, count), c};
  out.M.reserve(out.Sblocks.size());
  for (const auto &S : out.Sblocks)
  {
    out.M.emplace_back(U.adjoint() * S);
  }
  return out;
}

EigenvalueCount count_eigenvalues_inside(const MatrixPolynomial &P, const Contour &c)
{
  Complex acc = 0.0;
  for (int j = 0; j < c.nodes(); j++)
  {
    const auto lu = factor_node(P, c, j);
    const Matrix D = eval_derivative(P, c.node(j));
    acc += lu.solve(D).trace() * c.weight(j);
  }
  EigenvalueCount out;
  out.raw = acc;
  out.count = static_cast<int>(std::lround(acc.real()));
  out.quality = std::abs(acc - Complex(out.count, 0.0));
  return out;
}

Complex residue_moment(std::span<const PoleTerm> poles, int k)
{
  if (k < 0)
  {
    throw InvalidArgument("moment index must be nonnegative");
  }
  Complex mu = 0.0;
  for (const auto &p : poles)
  {
    // Residue of z^k c_i / (z - lambda)^i is c_i/(i-1)! * d^{i-1}/dz^{i-1} z^k.
    for (std::size_t idx = 0; idx < p.coeffs.size(); idx++)
    {
      const int i = static_cast<int>(idx) + 1;
      if (k < i - 1)
      {
        continue;
      }
      double falling = 1.0;   // k (k-1) ... (k-i+2) / (i-1)!
      for (int q = 0; q < i - 1; q++)
      {
        falling *= static_cast<double>(k - q) / static_cast<double>(q + 1);
      }
      mu += p.coeffs[idx] * falling * std::pow(p.lambda, k - i + 1);
    }
  }
  return mu;
}

Matrix random_probes(Index n, Index xi, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  Matrix W = random_matrix(n, xi, rng);
  for (Index j = 0; j < xi; j++)
  {
    W.col(j).normalize();
  }
  return W;
}

Vector random_probe(Index n, std::uint64_t seed)
{
  return random_probes(n, 1, seed).col(0);
}

}  // namespace invpair
