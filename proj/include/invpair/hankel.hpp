// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "invpair/contour.hpp"
#include "invpair/linalg.hpp"

namespace invpair
{

// Shifted (block) Hankel matrices H0(i,j) = M_{i+j}, H1(i,j) = M_{i+j+1}.
struct HankelPencil
{
  Matrix H0;
  Matrix H1;
  Index block_size = 1;

  Index size() const noexcept { return H0.rows(); }
};

HankelPencil build_hankel(const MomentSequence &moms, int m);

// Block version with m block rows and columns (size m * xi).
HankelPencil build_block_hankel(const BlockMomentSequence &moms, int m);

// Leading m x m sections of H0 and H1.
HankelPencil truncate(const HankelPencil &hp, Index m);

// Companion matrix C with H0 C = H1. The first m - xi columns are unit shifts,
// the trailing xi columns come from one solve with H0. Throws
// RankDeficientError (carrying the numerical rank of H0) when H0 is singular.
Matrix companion_from_pencil(const HankelPencil &hp);

// Eigenvalues of the pencil H1 - z H0, grouped into multiple eigenvalues.
std::vector<EigenCluster> pencil_eigenvalues(const HankelPencil &hp);

// Invariant pair X = [s_0 ... s_{m-1}], S = C from scalar probes.
InvariantPair extract_invariant_pair(const MatrixPolynomial &P, const Contour &c,
                                     const Vector &u, const Vector &v, int m);

// Block variant: builds ceil(m/xi) block rows, truncates the pencil to m x m
// and takes the first m columns of [S_0 S_1 ...] as X.
InvariantPair extract_block_invariant_pair(const MatrixPolynomial &P, const Contour &c,
                                           const Matrix &U, const Matrix &V, int m);

// Pencil size for a contour: the eigenvalue count when it is reliable and
// nonzero, otherwise the size at which the numerical rank of H0 stops
// growing (scalar probes, at most m_max).
int choose_pencil_size(const MatrixPolynomial &P, const Contour &c, const Vector &u,
                       const Vector &v, int m_max);

}  // namespace invpair
