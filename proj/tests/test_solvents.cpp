// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "fixtures.hpp"
#include "invpair/error.hpp"
#include "invpair/hankel.hpp"
#include "invpair/linalg.hpp"
#include "invpair/solvents.hpp"

using namespace invpair;
using oracle::max_abs;
using oracle::real_matrix;

namespace
{

std::vector<Eigenpair> printed_eigenpairs()
{
  Vector e1(2), e2(2), f(2);
  e1 << 1, 0;
  e2 << 0, 1;
  f << 1, 1;
  return {{1.0, e1}, {2.0, e2}, {3.0, f}, {4.0, f}};
}

const std::vector<Matrix> &printed_solvents()
{
  static const std::vector<Matrix> s{real_matrix({{1, 0}, {0, 2}}), real_matrix({{1, 2}, {0, 3}}),
                                     real_matrix({{3, 0}, {1, 2}}), real_matrix({{1, 3}, {0, 4}}),
                                     real_matrix({{4, 0}, {2, 2}})};
  return s;
}

// Distance from S to the nearest matrix in the list.
double nearest(const Matrix &S, const std::vector<Matrix> &list)
{
  double d = INFINITY;
  for (const auto &M : list)
    d = std::min(d, max_abs(S - M));
  return d;
}

Matrix eval_T(const MatrixPolynomial &T, const Matrix &S)
{
  return eval_pair(T, Matrix::Identity(S.rows(), S.rows()), S);
}

}  // namespace

TEST_CASE("solvent from an n x n pair")
{
  const auto P = fixture::problem("quad_solvent_2x2");
  const Matrix S0 = real_matrix({{1, 2}, {0, 3}});
  const auto s = solvent_from_pair(P, InvariantPair(Matrix::Identity(2, 2), S0));
  CHECK(max_abs(s.S - S0) <= 1e-14);
  CHECK(s.residual <= 1e-12);

  const auto s1 = solvent_from_pair(P, InvariantPair(Matrix::Identity(2, 2), real_matrix({{1, 0}, {0, 2}})));
  CHECK(max_abs(s1.S - real_matrix({{1, 0}, {0, 2}})) <= 1e-10);
  CHECK(s1.residual <= 1e-10);

  const auto B = fixture::problem("jordan_3x3");
  CHECK_THROWS_AS(solvent_from_pair(B, InvariantPair(Matrix::Ones(3, 5), Matrix::Identity(5, 5))),
                  DimensionError);
  CHECK_THROWS_AS(solvent_from_pair(P, InvariantPair(Matrix::Ones(2, 2), Matrix::Identity(2, 2))),
                  SingularMatrixError);
}

TEST_CASE("enumeration of the quadratic's solvents")
{
  const auto P = fixture::problem("quad_solvent_2x2");
  const auto en = enumerate_solvents(P, printed_eigenpairs());
  REQUIRE(en.solvents.size() == 5);
  REQUIRE(en.subsets.size() == 5);
  for (const auto &s : en.solvents)
  {
    CHECK(nearest(s.S, printed_solvents()) <= 1e-8);
    CHECK(s.residual <= 1e-10);
  }
  // Every printed solvent is found.
  std::vector<Matrix> found;
  for (const auto &s : en.solvents)
    found.push_back(s.S);
  for (const auto &M : printed_solvents())
    CHECK(nearest(M, found) <= 1e-8);
  REQUIRE(en.rejected.size() == 1);
  CHECK(en.rejected[0].indices == std::vector<int>{2, 3});
  CHECK(en.rejected[0].condition > 1e8);
  // Lexicographic order of the accepted subsets.
  CHECK(en.subsets[0] == std::vector<int>{0, 1});
  CHECK(en.subsets[4] == std::vector<int>{1, 3});
}

TEST_CASE("enumeration count under the Haar condition")
{
  std::mt19937_64 rng(107);
  for (int n = 2; n <= 3; n++)
  {
    std::vector<Matrix> A;
    for (int j = 0; j <= 2; j++)
      A.push_back(oracle::gaussian(n, n, rng));
    const MatrixPolynomial P(A);
    const auto ep = polynomial_eigenpairs(P);
    const auto en = enumerate_solvents(P, ep);

    std::vector<std::vector<int>> all;
    oracle::subsets(static_cast<int>(ep.size()), n, all);
    std::vector<Matrix> ref;
    std::vector<std::vector<int>> ref_subsets;
    for (const auto &sub : all)
    {
      Matrix W(n, n), D = Matrix::Zero(n, n);
      for (int i = 0; i < n; i++)
      {
        W.col(i) = ep[static_cast<std::size_t>(sub[static_cast<std::size_t>(i)])].vector;
        D(i, i) = ep[static_cast<std::size_t>(sub[static_cast<std::size_t>(i)])].value;
      }
      Eigen::FullPivLU<Matrix> lu(W);
      if (lu.rank() == n)
      {
        ref.push_back(W * D * lu.inverse());
        ref_subsets.push_back(sub);
      }
    }
    // C(2n, n): 6 for n = 2, 20 for n = 3.
    CHECK(all.size() == (n == 2 ? 6u : 20u));
    CHECK(ref.size() == all.size());
    REQUIRE(en.solvents.size() == ref.size());
    CHECK(en.rejected.empty());
    CHECK(en.subsets == ref_subsets);
    for (std::size_t i = 0; i < ref.size(); i++)
      CHECK(max_abs(en.solvents[i].S - ref[i]) <= 1e-10 * std::max(1.0, max_abs(ref[i])));
  }
}

TEST_CASE("enumeration preconditions")
{
  const auto P = fixture::problem("quad_solvent_2x2");
  auto ep = printed_eigenpairs();
  ep.push_back(ep[0]);
  CHECK_THROWS_AS(enumerate_solvents(P, ep), InvalidArgument);
  std::vector<Eigenpair> one{printed_eigenpairs()[0]};
  CHECK(enumerate_solvents(P, one).solvents.empty());
}

TEST_CASE("diagonal roots of the triangular example")
{
  const auto T = fixture::problem("tri_3x3");
  const auto r0 = diagonal_roots(T, 0);
  REQUIRE(r0.size() == 2);
  CHECK(std::abs(r0[0] - 3.0) <= 1e-12);
  CHECK(std::abs(r0[1] - 4.0) <= 1e-12);
  const auto r1 = diagonal_roots(T, 1);
  REQUIRE(r1.size() == 1);
  CHECK(std::abs(r1[0] - 3.0) <= 1e-12);
  const auto r2 = diagonal_roots(T, 2);
  REQUIRE(r2.size() == 1);
  CHECK(std::abs(r2[0] - 4.0) <= 1e-12);
}

TEST_CASE("triangular solve of the infinite-family example")
{
  const auto T = fixture::problem("tri_3x3");
  const auto none = triangular_solvent_branch(T, {3.0, 3.0, 4.0});
  CHECK(none.kind == FamilyKind::none);
  CHECK_FALSE(none.reason.empty());

  const auto fam = triangular_solvent_branch(T, {4.0, 3.0, 4.0});
  REQUIRE(fam.kind == FamilyKind::affine_family);
  CHECK(max_abs(fam.base - real_matrix({{4, 0, 1}, {0, 3, -1}, {0, 0, 4}})) <= 1e-10);
  REQUIRE(fam.directions.size() == 1);
  CHECK(max_abs(fam.directions[0] - real_matrix({{0, 1, 1}, {0, 0, 0}, {0, 0, 0}})) <= 1e-10);
  std::mt19937_64 rng(109);
  for (int s = 0; s < 5; s++)
  {
    const Complex c = oracle::gaussian(1, 1, rng)(0, 0) * 3.0;
    CHECK(eval_T(T, fam.base + c * fam.directions[0]).norm() <= 1e-10);
  }

  const auto all = triangular_solvent_solve(T);
  REQUIRE(all.size() == 2);
  CHECK(all[0].family.kind == FamilyKind::none);
  CHECK(all[1].family.kind == FamilyKind::affine_family);
  CHECK(std::string(to_string(FamilyKind::affine_family)) == "affine-family");

  CHECK_THROWS_AS(triangular_solvent_branch(T, {4.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(triangular_solvent_solve(fixture::problem("ss_2x2")), InvalidArgument);
}

TEST_CASE("generic triangular polynomial has one solvent per diagonal choice")
{
  std::mt19937_64 rng(113);
  const Index n = 3;
  const double roots[3][2] = {{1.0, -2.0}, {0.5, 3.0}, {-1.5, 2.5}};
  std::vector<Matrix> A(3, Matrix::Zero(n, n));
  for (Index i = 0; i < n; i++)
  {
    const double a = roots[i][0], b = roots[i][1];
    A[2](i, i) = 1;
    A[1](i, i) = -(a + b);
    A[0](i, i) = a * b;
    for (Index j = i + 1; j < n; j++)
      for (int p = 0; p < 3; p++)
        A[static_cast<std::size_t>(p)](i, j) = oracle::gaussian(1, 1, rng)(0, 0);
  }
  const MatrixPolynomial T(A);
  const auto br = triangular_solvent_solve(T);
  REQUIRE(br.size() == 8);
  for (const auto &b : br)
  {
    CHECK(b.family.kind == FamilyKind::unique);
    CHECK(eval_T(T, b.family.base).norm() <= 1e-10);
    for (Index i = 0; i < n; i++)
      CHECK(std::abs(b.family.base(i, i) - b.diagonal[static_cast<std::size_t>(i)]) == 0.0);
  }
}

TEST_CASE("solvent recovery from a triangular form")
{
  // M = I: the polynomial is its own triangular form.
  const auto T = fixture::problem("tri_3x3");
  const Matrix St = real_matrix({{4, 0, 1}, {0, 3, -1}, {0, 0, 4}});
  const auto s = solvent_from_triangular(T, Matrix::Identity(6, 6), St);
  CHECK(max_abs(s.S - St) <= 1e-12);
  CHECK(eval_T(T, s.S).norm() <= 1e-10);

  // M = [U; U C] with C the companion of a monic quadratic and S0 a solvent:
  // M [I; S0] = [Z1; Z1 S0], so S_t = Z1 S0 Z1^{-1} gives back S0.
  const auto P = fixture::problem("quad_solvent_2x2");
  const Matrix S0 = real_matrix({{1, 2}, {0, 3}});
  std::mt19937_64 rng(127);
  const Matrix U = oracle::gaussian(2, 4, rng);
  Matrix C = Matrix::Zero(4, 4);
  C.topRightCorner(2, 2) = Matrix::Identity(2, 2);
  C.bottomLeftCorner(2, 2) = -P.coeff(0);
  C.bottomRightCorner(2, 2) = -P.coeff(1);
  Matrix M(4, 4);
  M << U, U * C;
  Matrix IS(4, 2);
  IS << Matrix::Identity(2, 2), S0;
  const Matrix Z1 = (M * IS).topRows(2);
  const Matrix Stp = Z1 * S0 * Z1.inverse();
  const auto r = solvent_from_triangular(P, M, Stp);
  CHECK(max_abs(r.S - S0) <= 1e-8);
  CHECK(r.residual <= 1e-8);

  Matrix Ms = M;
  Ms.col(3) = Ms.col(2);
  CHECK_THROWS_AS(solvent_from_triangular(P, Ms, Stp), SingularMatrixError);
  CHECK_THROWS_AS(solvent_from_triangular(P, M, Matrix::Identity(3, 3)), DimensionError);
  // A matrix that is not a solvent of the transformed problem fails the check.
  CHECK_THROWS_AS(solvent_from_triangular(P, M, Stp + Matrix::Identity(2, 2)), VerificationError);
}

TEST_CASE("solvent verification")
{
  const auto P = fixture::problem("quad_solvent_2x2");
  const auto a = verify_solvent(P, real_matrix({{1, 0}, {0, 2}}), 1e-12);
  CHECK(a.certified);
  CHECK(a.residual <= 1e-12);
  for (double r : a.eigenpair_residuals)
    CHECK(r <= 1e-12);

  const auto b = verify_solvent(P, real_matrix({{1, 2}, {0, 3}}), 1e-12);
  CHECK(b.certified);
  const auto cl = cluster_eigenvalues(b.eigenvalues);
  REQUIRE(cl.size() == 2);
  CHECK(std::abs(cl[0].value - 1.0) <= 1e-12);
  CHECK(std::abs(cl[1].value - 3.0) <= 1e-12);

  const auto z = verify_solvent(P, Matrix::Zero(2, 2), 1e-8);
  CHECK_FALSE(z.certified);
  CHECK_FALSE(std::isfinite(z.residual));

  // Eigenpairs of every enumerated solvent are eigenpairs of P.
  const double scale = P.coeff(0).norm() + P.coeff(1).norm() + P.coeff(2).norm();
  for (const auto &s : enumerate_solvents(P, printed_eigenpairs()).solvents)
  {
    const auto v = verify_solvent(P, s.S, 1e-10);
    CHECK(v.certified);
    for (double r : v.eigenpair_residuals)
      CHECK(r <= 10 * 1e-10 * scale);
  }
}

TEST_CASE("infinite-family problem has the spectrum of its triangular form")
{
  const auto P = fixture::problem("infinite_3x3");
  const auto cl = cluster_eigenvalues(eigenvalues(companion_linearization(P)));
  REQUIRE(cl.size() == 2);
  CHECK(std::abs(cl[0].value - 3.0) <= 1e-8);
  CHECK(cl[0].multiplicity == 3);
  CHECK(std::abs(cl[1].value - 4.0) <= 1e-8);
  CHECK(cl[1].multiplicity == 3);
}
