// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "invpair/cli.hpp"
#include "invpair/error.hpp"
#include "invpair/hankel.hpp"
#include "invpair/io.hpp"
#include "invpair/linalg.hpp"
#include "invpair/refine.hpp"
#include "invpair/solvents.hpp"

namespace invpair::cli
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct Probes
{
  Vector u, v;
  Matrix U, V;
};

Probes probes_from(const fs::path &file)
{
  const json j = read_json_file(file.string());
  Probes p;
  if (j.contains("u"))
    p.u = vector_from_json(j["u"], file.string() + ".u");
  if (j.contains("v"))
    p.v = vector_from_json(j["v"], file.string() + ".v");
  if (j.contains("U"))
    p.U = matrix_from_json(j["U"], file.string() + ".U");
  if (j.contains("V"))
    p.V = matrix_from_json(j["V"], file.string() + ".V");
  return p;
}

Matrix perturb(const Matrix &A, double eps, std::mt19937_64 &rng)
{
  const Matrix G = random_matrix(A.rows(), A.cols(), rng);
  return A + eps * std::max(A.norm(), 1.0) / G.norm() * G;
}

struct Case
{
  std::string name;
  MatrixPolynomial P;
  Matrix X, S;
};

BenchRow run_case(const Case &c, double tol, int maxit)
{
  RefineOptions ro;
  ro.tol = tol;
  ro.maxit = maxit;
  BenchRow r;
  r.name = c.name;
  r.n = static_cast<long>(c.P.size());
  r.k = static_cast<long>(c.S.rows());
  ro.line_search = false;
  const auto plain = refine_pair(c.P, c.X, c.S, ro);
  ro.line_search = true;
  const auto ls = refine_pair(c.P, c.X, c.S, ro);
  r.plain_iterations = plain.report.iterations;
  r.plain_time = plain.report.wall_time;
  r.plain_converged = plain.report.converged;
  r.plain_residual = plain.report.residual_history.back();
  r.ls_iterations = ls.report.iterations;
  r.ls_time = ls.report.wall_time;
  r.ls_converged = ls.report.converged;
  r.ls_residual = ls.report.residual_history.back();
  return r;
}

// Exact pair of the k eigenvalues of smallest modulus.
std::pair<Matrix, Matrix> smallest_eigenpairs(const MatrixPolynomial &P, Index k)
{
  auto ep = polynomial_eigenpairs(P);
  std::stable_sort(ep.begin(), ep.end(), [](const Eigenpair &a, const Eigenpair &b)
                   { return std::abs(a.value) < std::abs(b.value); });
  Matrix X(P.size(), k), S = Matrix::Zero(k, k);
  for (Index i = 0; i < k; i++)
  {
    X.col(i) = ep[static_cast<std::size_t>(i)].vector;
    S(i, i) = ep[static_cast<std::size_t>(i)].value;
  }
  return {X, S};
}

}  // namespace

std::vector<BenchRow> run_bench(const std::string &data_dir, unsigned long long seed, double tol,
                                int maxit)
{
  const fs::path dir(data_dir);
  std::mt19937_64 rng(seed);
  std::vector<Case> cases;

  {
    const auto pf = parse_problem((dir / "ss_2x2.json").string());
    const auto pr = probes_from(dir / "ss_2x2_probes.json");
    const auto p = extract_invariant_pair(pf.P, Contour({1.0, 0.0}, 0.5), pr.u, pr.v, 3);
    cases.push_back({"ss_2x2/pair", pf.P, perturb(p.X(), 1e-1, rng), perturb(p.S(), 1e-1, rng)});
  }
  {
    const auto pf = parse_problem((dir / "diag_4x4.json").string());
    const auto pr = probes_from(dir / "diag_4x4_probes.json");
    const auto p = extract_invariant_pair(pf.P, Contour({0.75, 0.0}, 0.5), pr.u, pr.v, 4);
    cases.push_back({"diag_4x4/pair", pf.P, perturb(p.X(), 1e-1, rng), perturb(p.S(), 1e-1, rng)});
  }
  {
    const auto pf = parse_problem((dir / "jordan_3x3.json").string());
    const auto pr = probes_from(dir / "jordan_3x3_probes.json");
    const auto p = extract_block_invariant_pair(pf.P, Contour({1.0, 0.0}, 0.1), pr.U, pr.V, 5);
    cases.push_back({"jordan_3x3/block-pair", pf.P, perturb(p.X(), 1e-2, rng),
                     perturb(p.S(), 1e-2, rng)});
  }
  {
    const auto pf = parse_problem((dir / "quad_solvent_2x2.json").string());
    Matrix S(2, 2);
    S << 1, 0, 0, 2;
    cases.push_back({"quad_solvent_2x2/pair", pf.P, perturb(Matrix::Identity(2, 2), 2e-1, rng),
                     perturb(S, 2e-1, rng)});
  }

  // Random cubic and quartic problems around exact eigenvalue pairs.
  struct Spec
  {
    Index n;
    int degree;
    Index k;
    double eps;
  };
  const Spec specs[] = {{3, 3, 2, 0.1}, {3, 3, 3, 0.5}, {2, 4, 3, 0.1}, {4, 3, 2, 0.5},
                        {3, 4, 4, 0.1}, {5, 3, 3, 1.0}, {4, 4, 3, 0.5}, {2, 3, 2, 1.0},
                        {3, 3, 3, 2.0}, {4, 3, 4, 2.0}};
  int idx = 0;
  for (const auto &sp : specs)
  {
    std::vector<Matrix> A;
    for (int j = 0; j <= sp.degree; j++)
    {
      A.push_back(random_matrix(sp.n, sp.n, rng));
    }
    MatrixPolynomial P(std::move(A));
    auto [X, S] = smallest_eigenpairs(P, sp.k);
    std::ostringstream name;
    name << "random" << idx++ << "/n" << sp.n << "l" << sp.degree << "k" << sp.k;
    cases.push_back({name.str(), P, perturb(X, sp.eps, rng), perturb(S, sp.eps, rng)});
  }

  std::vector<BenchRow> rows;
  for (const auto &c : cases)
  {
    rows.push_back(run_case(c, tol, maxit));
  }
  return rows;
}

namespace
{

double max_abs_diff(const Matrix &A, const Matrix &B)
{
  if (A.rows() != B.rows() || A.cols() != B.cols())
  {
    return INFINITY;
  }
  return (A - B).cwiseAbs().maxCoeff();
}

std::string fmt(double x)
{
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// Each check appends to `fail` when it does not hold.
void check_expected(const json &e, const fs::path &dir, std::string &fail)
{
  auto note = [&](const std::string &what)
  { fail += (fail.empty() ? "" : "; ") + what; };
  const double tol = e.value("tol", 1e-8);
  const auto pf = parse_problem((dir / e.at("problem").get<std::string>()).string());
  const MatrixPolynomial &P = pf.P;
  std::optional<Contour> c;
  if (e.contains("contour"))
  {
    const json &cj = e["contour"];
    c.emplace(complex_from_json(cj.at("center"), "contour.center"), cj.at("radius").get<double>(),
              cj.value("nodes", Contour::kDefaultNodes));
  }
  Probes pr;
  if (e.contains("probes"))
  {
    pr = probes_from(dir / e["probes"].get<std::string>());
  }
  const json &ch = e.at("checks");

  if (ch.contains("count"))
  {
    const auto r = count_eigenvalues_inside(P, *c);
    if (r.count != ch["count"].get<int>() || r.quality > 1e-6)
      note("count " + std::to_string(r.count) + " quality " + fmt(r.quality));
  }
  if (ch.contains("moments"))
  {
    const auto mu = vector_from_json(ch["moments"], "moments");
    const auto ms = scalar_moments(P, *c, pr.u, pr.v, static_cast<int>(mu.size()));
    double d = 0;
    for (Index k = 0; k < mu.size(); k++)
      d = std::max(d, std::abs(ms.mu[static_cast<std::size_t>(k)] - mu(k)));
    if (!(d <= tol))
      note("moments differ by " + fmt(d));
  }
  if (ch.contains("block_moments"))
  {
    const auto &bm = ch["block_moments"];
    const auto ms = block_moments(P, *c, pr.U, pr.V, static_cast<int>(bm.size()));
    double d = 0;
    for (std::size_t k = 0; k < bm.size(); k++)
      d = std::max(d, max_abs_diff(ms.M[k], matrix_from_json(bm[k], "block_moments")));
    if (!(d <= tol))
      note("block moments differ by " + fmt(d));
  }
  if (ch.contains("companion"))
  {
    const int m = ch.at("m").get<int>();
    const auto ms = scalar_moments(P, *c, pr.u, pr.v, 2 * m);
    const Matrix C = companion_from_pencil(build_hankel(ms, m));
    const double d = max_abs_diff(C, matrix_from_json(ch["companion"], "companion"));
    if (!(d <= tol))
      note("companion differs by " + fmt(d));
  }
  if (ch.contains("pencil_eigenvalues"))
  {
    const int m = ch.at("m").get<int>();
    const auto ms = scalar_moments(P, *c, pr.u, pr.v, 2 * m);
    const auto cl = pencil_eigenvalues(build_hankel(ms, m));
    const auto &ex = ch["pencil_eigenvalues"];
    bool ok = cl.size() == ex.size();
    for (std::size_t i = 0; ok && i < cl.size(); i++)
    {
      ok = cl[i].multiplicity == ex[i].at("multiplicity").get<int>() &&
           std::abs(cl[i].value - complex_from_json(ex[i].at("value"), "value")) <= 1e-6;
    }
    if (!ok)
      note("pencil eigenvalue clusters differ");
  }
  if (ch.contains("singular_at"))
  {
    const int m = ch["singular_at"].at("m").get<int>();
    const int rank = ch["singular_at"].at("rank").get<int>();
    try
    {
      extract_invariant_pair(P, *c, pr.u, pr.v, m);
      note("no rank deficiency at m = " + std::to_string(m));
    }
    catch (const RankDeficientError &err)
    {
      if (err.rank() != rank)
        note("rank " + std::to_string(err.rank()) + " at m = " + std::to_string(m));
    }
  }
  if (ch.contains("pair"))
  {
    const auto &pj = ch["pair"];
    const int m = pj.at("m").get<int>();
    const auto p = extract_invariant_pair(P, *c, pr.u, pr.v, m);
    double d = 0;
    if (pj.contains("X"))
      d = std::max(d, max_abs_diff(p.X(), matrix_from_json(pj["X"], "pair.X")));
    if (pj.contains("S"))
      d = std::max(d, max_abs_diff(p.S(), matrix_from_json(pj["S"], "pair.S")));
    const double res = relative_residual(P, p.X(), p.S());
    if (!(d <= tol) || !(res <= pj.value("residual_max", tol)))
      note("pair differs by " + fmt(d) + ", residual " + fmt(res));
  }
  if (ch.contains("block_pair"))
  {
    const auto &bj = ch["block_pair"];
    const int m = bj.at("m").get<int>();
    const auto p = extract_block_invariant_pair(P, *c, pr.U, pr.V, m);
    const double res = eval_pair(P, p).norm();
    if (!(res <= bj.value("residual_max", tol)))
      note("block pair residual " + fmt(res));
    if (bj.contains("S"))
    {
      const double d = max_abs_diff(p.S(), matrix_from_json(bj["S"], "block_pair.S"));
      if (!(d <= tol))
        note("block pair T differs by " + fmt(d));
    }
    if (bj.contains("eigenvalue"))
    {
      const auto cl = cluster_eigenvalues(eigenvalues(p.S()));
      const Complex ev = complex_from_json(bj["eigenvalue"], "eigenvalue");
      if (cl.size() != 1 || cl[0].multiplicity != m || std::abs(cl[0].value - ev) > 1e-6)
        note("block pair eigenvalues do not form one cluster at the expected value");
    }
  }
  if (ch.contains("solvents"))
  {
    const auto en = enumerate_solvents(P, polynomial_eigenpairs(P));
    const auto &sj = ch["solvents"];
    bool ok = en.solvents.size() == sj.size();
    for (std::size_t i = 0; ok && i < sj.size(); i++)
    {
      const Matrix S = matrix_from_json(sj[i], "solvents");
      bool found = false;
      for (const auto &s : en.solvents)
        found = found || max_abs_diff(s.S, S) <= tol;
      ok = found;
    }
    if (!ok)
      note("solvent set differs (" + std::to_string(en.solvents.size()) + " found)");
    if (ch.contains("rejected"))
    {
      std::vector<std::vector<int>> rej;
      for (const auto &r : en.rejected)
        rej.push_back(r.indices);
      if (rej != ch["rejected"].get<std::vector<std::vector<int>>>())
        note("rejected subsets differ");
    }
  }
  if (ch.contains("triangular"))
  {
    const auto &tj = ch["triangular"];
    for (const auto &b : tj)
    {
      std::vector<Complex> diag;
      for (const auto &x : b.at("diagonal"))
        diag.push_back(complex_from_json(x, "diagonal"));
      const auto fam = triangular_solvent_branch(P, diag);
      if (to_string(fam.kind) != b.at("kind").get<std::string>())
      {
        note(std::string("branch kind ") + to_string(fam.kind));
        continue;
      }
      if (b.contains("base") && !(max_abs_diff(fam.base, matrix_from_json(b["base"], "base")) <= tol))
        note("family base differs");
      if (b.contains("directions"))
      {
        const auto &dj = b["directions"];
        bool ok = fam.directions.size() == dj.size();
        for (std::size_t i = 0; ok && i < dj.size(); i++)
          ok = max_abs_diff(fam.directions[i], matrix_from_json(dj[i], "directions")) <= tol;
        if (!ok)
          note("family directions differ");
      }
    }
  }
}

}  // namespace

std::vector<VerifyResult> verify_expected(const std::string &data_dir)
{
  const fs::path dir(data_dir);
  std::vector<fs::path> files;
  if (fs::is_directory(dir / "expected"))
  {
    for (const auto &entry : fs::directory_iterator(dir / "expected"))
    {
      if (entry.path().extension() == ".json")
        files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<VerifyResult> out;
  if (files.empty())
  {
    out.push_back({"expected", false, "no expected-output files under " + (dir / "expected").string()});
    return out;
  }
  for (const auto &f : files)
  {
    VerifyResult r;
    r.name = f.stem().string();
    std::string fail;
    try
    {
      check_expected(read_json_file(f.string()), dir, fail);
    }
    catch (const std::exception &e)
    {
      fail = std::string("error: ") + e.what();
    }
    r.ok = fail.empty();
    r.detail = r.ok ? "ok" : fail;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace invpair::cli
