// SPDX-License-Identifier: Apache-2.0

#include "invpair/solvents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "invpair/error.hpp"
#include "invpair/linalg.hpp"

namespace invpair
{

namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Condition threshold for the similarity transforms W, X and Y_1.
const double kMaxSimilarityCondition = 1.0 / std::sqrt(kEps);

Matrix similarity(const Matrix &W, const Matrix &T)
{
  // W T W^{-1} through W^T S^T = (W T)^T
  Eigen::PartialPivLU<Matrix> lu(W.transpose());
  return lu.solve((W * T).transpose()).transpose();
}

double binomial(int p, int n)
{
  double c = 1.0;
  for (int i = 0; i < n; i++)
  {
    c = c * static_cast<double>(p - i) / static_cast<double>(i + 1);
  }
  return c;
}

std::string describe(Complex z)
{
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

// Affine function c_0 + sum_k c_k p_k of the free parameters. A product of two
// non-constant expressions is outside this representation and poisons the
// result.
struct Affine
{
  std::vector<Complex> c{Complex(0.0)};
  bool poisoned = false;

  static Affine constant(Complex v)
  {
    Affine a;
    a.c[0] = v;
    return a;
  }
  bool is_constant() const
  {
    for (std::size_t k = 1; k < c.size(); k++)
    {
      if (c[k] != Complex(0.0))
      {
        return false;
      }
    }
    return true;
  }
  Complex coef(std::size_t k) const { return k < c.size() ? c[k] : Complex(0.0); }
  Affine &operator+=(const Affine &o)
  {
    if (o.c.size() > c.size())
    {
      c.resize(o.c.size(), Complex(0.0));
    }
    for (std::size_t k = 0; k < o.c.size(); k++)
    {
      c[k] += o.c[k];
    }
    poisoned = poisoned || o.poisoned;
    return *this;
  }
  Affine scaled(Complex s) const
  {
    Affine r = *this;
    for (auto &x : r.c)
    {
      x *= s;
    }
    return r;
  }
};

Affine operator*(const Affine &a, const Affine &b)
{
  if (a.is_constant())
  {
    Affine r = b.scaled(a.c[0]);
    r.poisoned = r.poisoned || a.poisoned;
    return r;
  }
  if (b.is_constant())
  {
    Affine r = a.scaled(b.c[0]);
    r.poisoned = r.poisoned || b.poisoned;
    return r;
  }
  Affine r;
  r.poisoned = true;
  return r;
}

void check_upper_triangular(const MatrixPolynomial &T)
{
  for (int p = 0; p <= T.degree(); p++)
  {
    const Matrix &A = T.coeff(p);
    const double tol = 1e-14 * std::max(1.0, A.cwiseAbs().maxCoeff());
    for (Index j = 0; j < A.cols(); j++)
    {
      for (Index i = j + 1; i < A.rows(); i++)
      {
        if (std::abs(A(i, j)) > tol)
        {
          throw InvalidArgument("coefficient T_" + std::to_string(p) +
                                " is not upper triangular (entry (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + "))");
        }
      }
    }
  }
}

std::vector<Complex> diagonal_poly(const MatrixPolynomial &T, Index i)
{
  std::vector<Complex> c;
  for (int p = 0; p <= T.degree(); p++)
  {
    c.push_back(T.coeff(p)(i, i));
  }
  return c;
}

// Divided difference of the polynomial c at (x, y); the derivative when x = y.
Complex divided_difference(const std::vector<Complex> &c, Complex x, Complex y)
{
  Complex acc = 0.0;
  for (std::size_t p = 1; p < c.size(); p++)
  {
    Complex s = 0.0;
    for (std::size_t q = 0; q < p; q++)
    {
      s += std::pow(x, static_cast<int>(q)) * std::pow(y, static_cast<int>(p - 1 - q));
    }
    acc += c[p] * s;
  }
  return acc;
}

// Magnitude of the terms of a polynomial at z, for relative zero tests.
double term_scale(const std::vector<Complex> &c, double zabs)
{
  double s = 0.0, zp = 1.0;
  for (const auto &x : c)
  {
    s += std::abs(x) * zp;
    zp *= std::max(1.0, zabs);
  }
  return std::max(s, 1e-300);
}

std::vector<Complex> derivative(const std::vector<Complex> &c)
{
  std::vector<Complex> d;
  for (std::size_t p = 1; p < c.size(); p++)
  {
    d.push_back(static_cast<double>(p) * c[p]);
  }
  if (d.empty())
  {
    d.push_back(0.0);
  }
  return d;
}

}  // namespace

Solvent solvent_from_pair(const MatrixPolynomial &P, const InvariantPair &pair)
{
  if (pair.k() != P.size() || pair.n() != P.size())
  {
    throw DimensionError("solvent_from_pair needs k = n (got k = " + std::to_string(pair.k()) +
                         ", n = " + std::to_string(P.size()) + ")");
  }
  const double cond = condition_number(pair.X());
  if (!(cond < kMaxSimilarityCondition))
  {
    throw SingularMatrixError("solvent_from_pair: X is numerically singular", cond);
  }
  Solvent out;
  out.S = similarity(pair.X(), pair.S());
  out.residual = eval_pair(P, Matrix::Identity(P.size(), P.size()), out.S).norm();
  return out;
}

SolventEnumeration enumerate_solvents(const MatrixPolynomial &P,
                                      const std::vector<Eigenpair> &eigpairs)
{
  const int n = static_cast<int>(P.size());
  const int p = static_cast<int>(eigpairs.size());
  if (p > P.degree() * n)
  {
    throw InvalidArgument("more eigenpairs than degree * n");
  }
  for (const auto &ep : eigpairs)
  {
    if (ep.vector.size() != n)
    {
      throw DimensionError("eigenvector length does not match the polynomial size");
    }
  }
  SolventEnumeration out;
  if (p < n)
  {
    return out;
  }
  if (binomial(p, n) > static_cast<double>(kMaxSubsets))
  {
    throw InvalidArgument("too many subsets to enumerate (C(" + std::to_string(p) + "," +
                          std::to_string(n) + ") > " + std::to_string(kMaxSubsets) + ")");
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; i++)
  {
    idx[static_cast<std::size_t>(i)] = i;
  }
  for (;;)
  {
    Matrix W(n, n), D = Matrix::Zero(n, n);
    for (int i = 0; i < n; i++)
    {
      const auto &ep = eigpairs[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      W.col(i) = ep.vector;
      D(i, i) = ep.value;
    }
    const double cond = condition_number(W);
    if (cond < kMaxSimilarityCondition)
    {
      Solvent s;
      s.S = similarity(W, D);
      s.residual = eval_pair(P, Matrix::Identity(n, n), s.S).norm();
      out.solvents.push_back(std::move(s));
      out.subsets.push_back(idx);
    }
    else
    {
      out.rejected.push_back({idx, cond});
    }
    // next combination in lexicographic order
    int i = n - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == p - n + i)
    {
      i--;
    }
    if (i < 0)
    {
      break;
    }
    idx[static_cast<std::size_t>(i)]++;
    for (int j = i + 1; j < n; j++)
    {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

const char *to_string(FamilyKind k)
{
  switch (k)
  {
    case FamilyKind::none:
      return "none";
    case FamilyKind::unique:
      return "unique";
    case FamilyKind::affine_family:
      return "affine-family";
  }
  return "?";
}

std::vector<Complex> diagonal_roots(const MatrixPolynomial &T, Index i)
{
  const auto c = diagonal_poly(T, i);
  bool nonzero = false;
  for (const auto &x : c)
  {
    nonzero = nonzero || x != Complex(0.0);
  }
  if (!nonzero)
  {
    throw InvalidArgument("diagonal polynomial T_" + std::to_string(i + 1) + std::to_string(i + 1) +
                          " vanishes identically");
  }
  const auto roots = polynomial_roots(c);
  std::vector<Complex> out;
  for (const auto &cl : cluster_eigenvalues(roots))
  {
    // A root of multiplicity m is a simple root of the (m-1)-th derivative.
    std::vector<Complex> f = c;
    for (int d = 1; d < cl.multiplicity; d++)
    {
      f = derivative(f);
    }
    const auto df = derivative(f);
    Complex z = cl.value;
    for (int it = 0; it < 20; it++)
    {
      const Complex dz = polyval(df, z);
      if (dz == Complex(0.0))
      {
        break;
      }
      const Complex step = polyval(f, z) / dz;
      z -= step;
      if (std::abs(step) <= 4 * kEps * std::max(1.0, std::abs(z)))
      {
        break;
      }
    }
    out.push_back(z);
  }
  return out;
}

TriangularSolventFamily triangular_solvent_branch(const MatrixPolynomial &T,
                                                  const std::vector<Complex> &diagonal)
{
  check_upper_triangular(T);
  const Index n = T.size();
  if (static_cast<Index>(diagonal.size()) != n)
  {
    throw DimensionError("diagonal has " + std::to_string(diagonal.size()) +
                         " entries, expected " + std::to_string(n));
  }
  const int l = T.degree();
  double tmax = 0.0;
  for (int p = 0; p <= l; p++)
  {
    tmax = std::max(tmax, T.coeff(p).cwiseAbs().maxCoeff());
  }

  std::vector<std::vector<Affine>> X(static_cast<std::size_t>(n),
                                     std::vector<Affine>(static_cast<std::size_t>(n)));
  for (Index i = 0; i < n; i++)
  {
    X[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
      Affine::constant(diagonal[static_cast<std::size_t>(i)]);
  }
  auto at = [&](Index i, Index j) -> Affine & {
    return X[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };
  std::size_t nparams = 0;
  std::vector<bool> eliminated{false};   // index 0 is the constant slot

  TriangularSolventFamily fam;
  for (Index d = 1; d < n; d++)
  {
    for (Index i = 0; i + d < n; i++)
    {
      const Index j = i + d;
      const auto ci = diagonal_poly(T, i);
      const Complex xi = diagonal[static_cast<std::size_t>(i)];
      const Complex xj = diagonal[static_cast<std::size_t>(j)];
      const Complex a = divided_difference(ci, xi, xj);
      const double ascale = term_scale(ci, std::max(std::abs(xi), std::abs(xj)));

      // b = (T(S))_{ij} with x_ij = 0: columns S^p e_j on rows i..j.
      double smax = 1.0;
      for (Index r = i; r <= j; r++)
      {
        for (Index s = r; s <= j; s++)
        {
          smax = std::max(smax, std::abs(at(r, s).c[0]));
        }
      }
      std::vector<Affine> col(static_cast<std::size_t>(d + 1));
      col[static_cast<std::size_t>(d)] = Affine::constant(1.0);
      Affine b;
      for (int p = 0; p <= l; p++)
      {
        if (p > 0)
        {
          std::vector<Affine> next(static_cast<std::size_t>(d + 1));
          for (Index r = i; r <= j; r++)
          {
            for (Index s = r; s <= j; s++)
            {
              if (r == i && s == j)
              {
                continue;   // the unknown itself
              }
              next[static_cast<std::size_t>(r - i)] += at(r, s) * col[static_cast<std::size_t>(s - i)];
            }
          }
          col = std::move(next);
        }
        for (Index r = i; r <= j; r++)
        {
          const Complex t = T.coeff(p)(i, r);
          if (t != Complex(0.0))
          {
            b += col[static_cast<std::size_t>(r - i)].scaled(t);
          }
        }
      }
      if (b.poisoned)
      {
        throw Error("triangular solve: entry (" + std::to_string(i + 1) + "," +
                    std::to_string(j + 1) +
                    ") depends nonlinearly on free parameters; not supported");
      }
      const double btol = 1e-8 * std::max(1.0, tmax) * std::pow(smax, l) * static_cast<double>(l + 1);

      if (std::abs(a) > 100.0 * kEps * ascale)
      {
        at(i, j) = b.scaled(-1.0 / a);
        continue;
      }
      // a = 0: x_ij is free and b = 0 becomes a constraint on earlier parameters.
      nparams++;
      eliminated.push_back(false);
      Affine fresh;
      fresh.c.assign(nparams + 1, Complex(0.0));
      fresh.c[nparams] = 1.0;
      at(i, j) = fresh;

      std::size_t kstar = 0;
      double best = 0.0;
      for (std::size_t k = 1; k < b.c.size(); k++)
      {
        if (std::abs(b.c[k]) > best)
        {
          best = std::abs(b.c[k]);
          kstar = k;
        }
      }
      if (kstar == 0 || best <= btol)
      {
        if (std::abs(b.c[0]) > btol)
        {
          fam.kind = FamilyKind::none;
          fam.reason = "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                       "): coefficient vanishes but the remaining term is " +
                       describe(b.c[0]);
          return fam;
        }
        continue;
      }
      // p_k* = -(b - b_k* p_k*) / b_k*, substituted everywhere.
      Affine sub = b.scaled(-1.0 / b.c[kstar]);
      sub.c[kstar] = 0.0;
      for (Index r = 0; r < n; r++)
      {
        for (Index s = r + 1; s < n; s++)
        {
          Affine &e = at(r, s);
          const Complex w = e.coef(kstar);
          if (w != Complex(0.0))
          {
            e.c[kstar] = 0.0;
            e += sub.scaled(w);
          }
        }
      }
      eliminated[kstar] = true;
    }
  }

  fam.base = Matrix::Zero(n, n);
  for (Index r = 0; r < n; r++)
  {
    for (Index s = r; s < n; s++)
    {
      fam.base(r, s) = at(r, s).c[0];
    }
  }
  for (std::size_t k = 1; k <= nparams; k++)
  {
    if (eliminated[k])
    {
      continue;
    }
    Matrix D = Matrix::Zero(n, n);
    for (Index r = 0; r < n; r++)
    {
      for (Index s = r + 1; s < n; s++)
      {
        D(r, s) = at(r, s).coef(k);
      }
    }
    if (!D.isZero(0.0))
    {
      fam.directions.push_back(std::move(D));
    }
  }
  fam.kind = fam.directions.empty() ? FamilyKind::unique : FamilyKind::affine_family;
  return fam;
}

std::vector<TriangularBranch> triangular_solvent_solve(const MatrixPolynomial &T)
{
  check_upper_triangular(T);
  const Index n = T.size();
  std::vector<std::vector<Complex>> roots;
  double branches = 1.0;
  for (Index i = 0; i < n; i++)
  {
    roots.push_back(diagonal_roots(T, i));
    branches *= static_cast<double>(roots.back().size());
  }
  std::vector<TriangularBranch> out;
  if (branches == 0.0)
  {
    return out;
  }
  if (branches > static_cast<double>(kMaxBranches))
  {
    throw InvalidArgument("too many diagonal branches (" + std::to_string(branches) + " > " +
                          std::to_string(kMaxBranches) + ")");
  }
  std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
  for (;;)
  {
    TriangularBranch br;
    for (Index i = 0; i < n; i++)
    {
      br.diagonal.push_back(roots[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]]);
    }
    br.family = triangular_solvent_branch(T, br.diagonal);
    out.push_back(std::move(br));
    Index i = n - 1;
    while (i >= 0)
    {
      auto &pi = pick[static_cast<std::size_t>(i)];
      if (++pi < roots[static_cast<std::size_t>(i)].size())
      {
        break;
      }
      pi = 0;
      i--;
    }
    if (i < 0)
    {
      break;
    }
  }
  return out;
}

Solvent solvent_from_triangular(const MatrixPolynomial &P, const Matrix &M, const Matrix &St,
                                double tol)
{
  const Index n = P.size();
  const int l = P.degree();
  if (M.rows() != l * n || M.cols() != l * n)
  {
    throw DimensionError("M must be " + std::to_string(l * n) + "x" + std::to_string(l * n));
  }
  if (St.rows() != n || St.cols() != n)
  {
    throw DimensionError("S_t must be n x n");
  }
  if (numerical_rank(M) < l * n)
  {
    throw SingularMatrixError("solvent_from_triangular: M is singular", condition_number(M));
  }
  Matrix Z(l * n, n);
  Matrix Sp = Matrix::Identity(n, n);
  for (int b = 0; b < l; b++)
  {
    Z.middleRows(b * n, n) = Sp;
    Sp = Sp * St;
  }
  const Matrix Y = Eigen::PartialPivLU<Matrix>(M).solve(Z);
  const Matrix Y1 = Y.topRows(n);
  const double cond = condition_number(Y1);
  if (!(cond < kMaxSimilarityCondition))
  {
    throw SingularMatrixError("solvent_from_triangular: Y_1 is singular for this S_t", cond);
  }
  Solvent out;
  out.S = similarity(Y1, St);
  out.residual = eval_pair(P, Matrix::Identity(n, n), out.S).norm();
  if (!(out.residual <= tol))
  {
    std::ostringstream os;
    os << "solvent_from_triangular: residual " << out.residual << " exceeds " << tol;
    throw VerificationError(os.str());
  }
  return out;
}

SolventCheck verify_solvent(const MatrixPolynomial &P, const Matrix &S, double tol)
{
  const Index n = P.size();
  if (S.rows() != n || S.cols() != n)
  {
    throw DimensionError("solvent must be n x n");
  }
  SolventCheck out;
  const double rn = eval_pair(P, Matrix::Identity(n, n), S).norm();
  const double sn = S.norm();
  out.residual = sn > 0.0 ? rn / sn : std::numeric_limits<double>::infinity();
  Eigen::ComplexEigenSolver<Matrix> es(S, true);
  bool ok = out.residual <= tol;
  for (Index i = 0; i < n; i++)
  {
    const Complex mu = es.eigenvalues()(i);
    const Vector w = es.eigenvectors().col(i);
    const double r = (eval_scalar(P, mu) * w).norm() / w.norm();
    out.eigenvalues.push_back(mu);
    out.eigenpair_residuals.push_back(r);
    ok = ok && r <= tol;
  }
  out.certified = ok;
  return out;
}

}  // namespace invpair
