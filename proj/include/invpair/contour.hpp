// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "invpair/matpoly.hpp"

namespace invpair
{

// Circle center + radius * exp(i t), discretized by the N-point trapezoid rule.
class Contour
{
public:
  static constexpr int kDefaultNodes = 64;

  Contour(Complex center, double radius, int nodes = kDefaultNodes);

  Complex center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int nodes() const noexcept { return nodes_; }

  // j-th node z_j = center + radius * exp(2 pi i j / N).
  Complex node(int j) const;

  // Quadrature weight so that (1/2 pi i) \oint f ~= sum_j weight(j) f(z_j).
  Complex weight(int j) const;

  bool encloses(Complex z) const noexcept { return std::abs(z - center_) < radius_; }

private:
  Complex center_;
  double radius_;
  int nodes_;
};

struct MomentSequence
{
  Vector u;
  Vector v;
  std::vector<Complex> mu;
  std::vector<Vector> svecs;
  Contour contour;
};

struct BlockMomentSequence
{
  Matrix U;
  Matrix V;
  std::vector<Matrix> M;
  std::vector<Matrix> Sblocks;
  Contour contour;

  Index block_size() const noexcept { return U.cols(); }
};

// Scalar moments mu_k = u^H s_k, s_k ~= (1/2 pi i) \oint z^k P(z)^{-1} v dz,
// k = 0..count-1.
MomentSequence scalar_moments(const MatrixPolynomial &P, const Contour &c, const Vector &u,
                              const Vector &v, int count);

// Block moments M_k = U^H S_k, S_k ~= (1/2 pi i) \oint z^k P(z)^{-1} V dz.
BlockMomentSequence block_moments(const MatrixPolynomial &P, const Contour &c,
                                  const Matrix &U, const Matrix &V, int count);

struct EigenvalueCount
{
  int count = 0;
  Complex raw;          // unrounded quadrature value
  double quality = 0;   // |raw - count|
  bool reliable() const noexcept { return quality <= 0.1; }
};

// Number of eigenvalues inside c, from (1/2 pi i) \oint trace(P^{-1} P') dz.
EigenvalueCount count_eigenvalues_inside(const MatrixPolynomial &P, const Contour &c);

struct PoleTerm
{
  Complex lambda;
  std::vector<Complex> coeffs;   // c_1..c_m of the principal part sum c_i / (z - lambda)^i
};

// mu_k from the partial-fraction data of u^H P(z)^{-1} v inside the contour.
Complex residue_moment(std::span<const PoleTerm> poles, int k);

// Seeded complex Gaussian probes with unit-norm columns.
Vector random_probe(Index n, std::uint64_t seed);
Matrix random_probes(Index n, Index xi, std::uint64_t seed);

// Threshold on the per-node condition estimate above which an eigenvalue is
// considered to lie on the contour.
inline constexpr double kNearContourCondition = 1e13;

}  // namespace invpair
