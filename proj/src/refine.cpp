// SPDX-License-Identifier: Apache-2.0

#include "invpair/refine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "invpair/conditioning.hpp"
#include "invpair/error.hpp"
#include "invpair/linalg.hpp"

namespace invpair
{

namespace
{

double trace_re(const Matrix &A, const Matrix &B)
{
  // trace(A^* B + B^* A) = 2 Re <A, B>
  return 2.0 * A.cwiseProduct(B.conjugate()).sum().real();
}

// Resolvents (z_j I - S)^{-1} at every node, with the enclosure check.
std::vector<Matrix> resolvents(const Matrix &S, const Contour &c)
{
  for (const Complex &ev : eigenvalues(S))
  {
    if (!c.encloses(ev))
    {
      throw InvalidArgument("line-search contour does not enclose the spectrum of S");
    }
  }
  const Index k = S.rows();
  std::vector<Matrix> R;
  R.reserve(static_cast<std::size_t>(c.nodes()));
  for (int j = 0; j < c.nodes(); j++)
  {
    Eigen::PartialPivLU<Matrix> lu(c.node(j) * Matrix::Identity(k, k) - S);
    if (!(lu.rcond() * kNearContourCondition > 1.0))
    {
      throw NearContourError("eigenvalue of S on or near the line-search contour", j);
    }
    R.push_back(lu.inverse());
  }
  return R;
}

StepPolynomial assemble(const Matrix &R0, const Matrix &A, const Matrix &B)
{
  StepPolynomial p;
  p.alpha = R0.squaredNorm();
  p.theta = A.squaredNorm();
  p.phi = B.squaredNorm();
  p.beta = trace_re(R0, A);
  p.gamma = trace_re(R0, B);
  p.eta = trace_re(A, B);
  return p;
}

bool spectrum_inside(const Matrix &S, const Contour &c)
{
  for (const Complex &ev : eigenvalues(S))
  {
    if (!c.encloses(ev))
    {
      return false;
    }
  }
  return true;
}

Contour iteration_contour(const Matrix &S, const RefineOptions &opts)
{
  if (opts.contour && spectrum_inside(S, *opts.contour))
  {
    return *opts.contour;
  }
  return default_line_search_contour(S, opts.contour ? opts.contour->nodes()
                                                     : Contour::kDefaultNodes);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Picks the step along (dX, dS). The model polynomial is exact for degree <= 2;
// beyond that a model step is only taken if it really lowers the residual.
template <class Residual, class Model>
double choose_step(const MatrixPolynomial &P, double current, Residual &&residual_at,
                   Model &&model, RefinementReport &rep, int iter)
{
  double tstar = 1.0;
  try
  {
    tstar = minimize_step(model());
  }
  catch (const Error &e)
  {
    rep.warnings.push_back("iteration " + std::to_string(iter) +
                           ": line search skipped (" + e.what() + ")");
    return 1.0;
  }
  if (P.degree() <= 2)
  {
    return tstar;
  }
  for (double t : {tstar, 1.0, 0.5})
  {
    if (residual_at(t) < current)
    {
      return t;
    }
  }
  return 1.0;
}

}  // namespace

Matrix frechet_apply(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                     const Matrix &dX, const Matrix &dS)
{
  if (dX.rows() != X.rows() || dX.cols() != X.cols() || dS.rows() != S.rows() ||
      dS.cols() != S.cols())
  {
    throw DimensionError("frechet_apply: direction does not conform with the pair");
  }
  const auto pw = matrix_powers(S, P.degree());
  Matrix out = eval_pair(P, dX, S);
  // D(S^j)[dS] = sum_{i<j} S^i dS S^{j-i-1}, built up as D_j = D_{j-1} S + S^{j-1} dS.
  Matrix D = Matrix::Zero(S.rows(), S.cols());
  for (int j = 1; j <= P.degree(); j++)
  {
    D = D * S + pw[static_cast<std::size_t>(j - 1)] * dS;
    out += P.coeff(j) * X * D;
  }
  return out;
}

NewtonCorrection newton_correction(const MatrixPolynomial &P, const Matrix &X, const Matrix &S)
{
  const Matrix J = pair_jacobian(P, X, S);
  const Matrix R = eval_pair(P, X, S);
  const auto sol = min_norm_solve(J, -vec(R));
  const Index n = X.rows(), k = S.rows();
  NewtonCorrection out;
  out.dX = unvec(sol.x.col(0).head(n * k), n, k);
  out.dS = unvec(sol.x.col(0).tail(k * k), k, k);
  out.rank = sol.rank;
  out.residual = sol.residual;
  out.full_rank = sol.rank == J.rows();
  return out;
}

std::array<double, 7> StepPolynomial::coefficients() const
{
  return {alpha, -2.0 * alpha, alpha + beta, gamma - beta, theta - gamma, eta, phi};
}

double StepPolynomial::operator()(double t) const
{
  const auto c = coefficients();
  double acc = 0.0;
  for (int i = 6; i >= 0; i--)
  {
    acc = acc * t + c[static_cast<std::size_t>(i)];
  }
  return acc;
}

Contour default_line_search_contour(const Matrix &S, int nodes)
{
  const Index k = S.rows();
  const Complex c = S.trace() / static_cast<double>(k);
  double rho = 2.0 * spectral_norm(S - c * Matrix::Identity(k, k));
  if (!(rho > 1e-8 * std::max(1.0, std::abs(c))))
  {
    rho = std::max(1.0, std::abs(c));
  }
  return Contour(c, rho, nodes);
}

StepPolynomial line_search_poly(const MatrixPolynomial &P, const Matrix &X, const Matrix &S,
                                const Matrix &dX, const Matrix &dS, const Contour &c)
{
  const auto R = resolvents(S, c);
  const Index n = X.rows(), k = S.rows();
  Matrix A = Matrix::Zero(n, k), B = Matrix::Zero(n, k);
  for (int j = 0; j < c.nodes(); j++)
  {
    const Matrix &Rj = R[static_cast<std::size_t>(j)];
    const Matrix Pz = eval_scalar(P, c.node(j)) * c.weight(j);
    const Matrix RdSR = Rj * dS * Rj;
    A += Pz * (dX + X * Rj * dS) * RdSR;
    B += Pz * dX * Rj * dS * RdSR;
  }
  return assemble(eval_pair(P, X, S), A, B);
}

StepPolynomial solvent_line_search_poly(const MatrixPolynomial &P, const Matrix &S,
                                        const Matrix &dS, const Contour &c)
{
  const auto R = resolvents(S, c);
  const Index n = S.rows();
  Matrix A = Matrix::Zero(n, n);
  for (int j = 0; j < c.nodes(); j++)
  {
    const Matrix &Rj = R[static_cast<std::size_t>(j)];
    A += eval_scalar(P, c.node(j)) * c.weight(j) * Rj * dS * Rj * dS * Rj;
  }
  return assemble(eval_pair(P, Matrix::Identity(n, n), S), A, Matrix::Zero(n, n));
}

double minimize_step(const StepPolynomial &poly)
{
  const auto c = poly.coefficients();
  std::vector<Complex> dc;
  for (std::size_t i = 1; i < c.size(); i++)
  {
    dc.emplace_back(static_cast<double>(i) * c[i], 0.0);
  }
  std::vector<double> cand{1.0, 2.0};
  bool nonzero = false;
  for (const auto &x : dc)
  {
    nonzero = nonzero || x != Complex(0.0);
  }
  if (nonzero)
  {
    for (const Complex &r : polynomial_roots(dc))
    {
      if (std::abs(r.imag()) <= 1e-8 * std::max(1.0, std::abs(r)) && r.real() >= -1e-12 &&
          r.real() <= 2.0 + 1e-12)
      {
        cand.push_back(std::clamp(r.real(), 0.0, 2.0));
      }
    }
  }
  const double p1 = poly(1.0);
  double best = 1.0, pbest = p1;
  for (double t : cand)
  {
    const double pt = poly(t);
    if (pt < pbest)
    {
      best = t;
      pbest = pt;
    }
  }
  // Ties (to rounding) go to the Newton step.
  const double scale = std::max({std::abs(poly.alpha), std::abs(p1), 1e-300});
  if (p1 - pbest <= 1e-14 * scale)
  {
    return 1.0;
  }
  return best;
}

PairRefinement refine_pair(const MatrixPolynomial &P, const Matrix &X0, const Matrix &S0,
                           const RefineOptions &opts)
{
  if (opts.maxit < 0)
  {
    throw InvalidArgument("maxit must be nonnegative");
  }
  const auto t0 = std::chrono::steady_clock::now();
  Matrix X = X0, S = S0;
  InvariantPair(X, S);   // validates dimensions
  RefinementReport rep;
  for (;;)
  {
    const double rn = eval_pair(P, X, S).norm();
    const double xn = X.norm();
    const double rel = rn / xn;
    rep.residual_history.push_back(rel);
    if (rel < opts.tol)
    {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= opts.maxit || !std::isfinite(rel))
    {
      break;
    }
    const auto nc = newton_correction(P, X, S);
    if (!nc.full_rank)
    {
      rep.warnings.push_back("iteration " + std::to_string(rep.iterations) +
                             ": Jacobian rank " + std::to_string(nc.rank) +
                             " below full row rank " + std::to_string(X.size()));
    }
    double t = 1.0;
    if (opts.line_search)
    {
      auto residual_at = [&](double s)
      { return eval_pair(P, X + s * nc.dX, S + s * nc.dS).norm(); };
      auto model = [&]
      { return line_search_poly(P, X, S, nc.dX, nc.dS, iteration_contour(S, opts)); };
      t = choose_step(P, rn, residual_at, model, rep, rep.iterations);
    }
    X += t * nc.dX;
    S += t * nc.dS;
    rep.step_lengths.push_back(t);
    rep.iterations++;
  }
  rep.wall_time = seconds_since(t0);
  return {InvariantPair(std::move(X), std::move(S)), std::move(rep)};
}

SolventRefinement refine_solvent(const MatrixPolynomial &P, const Matrix &S0,
                                 const RefineOptions &opts)
{
  if (opts.maxit < 0)
  {
    throw InvalidArgument("maxit must be nonnegative");
  }
  const Index n = P.size();
  if (S0.rows() != n || S0.cols() != n)
  {
    throw DimensionError("solvent must be n x n");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix I = Matrix::Identity(n, n);
  const double sqn = std::sqrt(static_cast<double>(n));
  Matrix S = S0;
  RefinementReport rep;
  double rn = 0.0;
  for (;;)
  {
    const Matrix R = eval_pair(P, I, S);
    rn = R.norm();
    const double rel = rn / sqn;
    rep.residual_history.push_back(rel);
    if (rel < opts.tol)
    {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= opts.maxit || !std::isfinite(rel))
    {
      break;
    }
    const Matrix J = solvent_jacobian(P, S);
    const auto sol = min_norm_solve(J, -vec(R));
    if (sol.rank < J.rows())
    {
      rep.warnings.push_back("iteration " + std::to_string(rep.iterations) +
                             ": solvent derivative singular (rank " + std::to_string(sol.rank) +
                             "), pseudoinverse used");
    }
    const Matrix dS = unvec(sol.x.col(0), n, n);
    double t = 1.0;
    if (opts.line_search)
    {
      auto residual_at = [&](double s) { return eval_pair(P, I, S + s * dS).norm(); };
      auto model = [&]
      { return solvent_line_search_poly(P, S, dS, iteration_contour(S, opts)); };
      t = choose_step(P, rn, residual_at, model, rep, rep.iterations);
    }
    S += t * dS;
    rep.step_lengths.push_back(t);
    rep.iterations++;
  }
  rep.wall_time = seconds_since(t0);
  return {std::move(S), rn, std::move(rep)};
}

}  // namespace invpair
