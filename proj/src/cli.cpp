// SPDX-License-Identifier: Apache-2.0

#include "invpair/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "invpair/conditioning.hpp"
#include "invpair/error.hpp"
#include "invpair/hankel.hpp"
#include "invpair/io.hpp"
#include "invpair/linalg.hpp"
#include "invpair/refine.hpp"
#include "invpair/solvents.hpp"

#ifndef INVPAIR_DATA_DIR
#define INVPAIR_DATA_DIR "data"
#endif

namespace invpair::cli
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Options
{
  std::string problem;
  std::string center = "0,0";
  double radius = 1.0;
  int nodes = Contour::kDefaultNodes;
  int m = 0;
  int xi = 2;
  int count = 0;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-12;
  int maxit = 500;
  bool no_line_search = false;
  std::string out;
  std::string format = "json";
  std::string probe_file;
  std::string pair_file;
  std::string transform_file;
  double perturb = 0.0;
  bool timing = false;
  bool verify = false;
  std::string data_dir = INVPAIR_DATA_DIR;
};

// Output in either format. CSV records are "entity,row,col,value" unless a
// command supplies its own table.
struct Output
{
  json doc = json::object();
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;

  void matrix_csv(const std::string &entity, const Matrix &A)
  {
    for (Index r = 0; r < A.rows(); r++)
    {
      for (Index c = 0; c < A.cols(); c++)
      {
        csv_rows.push_back({entity, std::to_string(r), std::to_string(c), format_complex(A(r, c))});
      }
    }
  }
};

Complex parse_center(const std::string &s)
{
  std::stringstream ss(s);
  std::string re, im;
  std::getline(ss, re, ',');
  std::getline(ss, im, ',');
  try
  {
    std::size_t pos = 0;
    const double r = std::stod(re, &pos);
    if (pos != re.size())
    {
      throw UsageError("");
    }
    double i = 0.0;
    if (!im.empty())
    {
      i = std::stod(im, &pos);
      if (pos != im.size())
      {
        throw UsageError("");
      }
    }
    std::string rest;
    if (std::getline(ss, rest))
    {
      throw UsageError("");
    }
    return {r, i};
  }
  catch (const std::exception &)
  {
    throw UsageError("invalid --center '" + s + "', expected re,im");
  }
}

Contour make_contour(const Options &o)
{
  try
  {
    return Contour(parse_center(o.center), o.radius, o.nodes);
  }
  catch (const InvalidArgument &e)
  {
    throw UsageError(std::string("invalid contour: ") + e.what());
  }
}

struct Probes
{
  Vector u, v;
  Matrix U, V;
};

Probes load_probes(const Options &o, Index n, Index xi)
{
  Probes p;
  if (!o.probe_file.empty())
  {
    const json j = read_json_file(o.probe_file);
    if (j.contains("u"))
    {
      p.u = vector_from_json(j["u"], o.probe_file + ".u");
    }
    if (j.contains("v"))
    {
      p.v = vector_from_json(j["v"], o.probe_file + ".v");
    }
    if (j.contains("U"))
    {
      p.U = matrix_from_json(j["U"], o.probe_file + ".U");
    }
    if (j.contains("V"))
    {
      p.V = matrix_from_json(j["V"], o.probe_file + ".V");
    }
  }
  if (p.u.size() == 0)
  {
    p.u = random_probe(n, o.seed);
  }
  if (p.v.size() == 0)
  {
    p.v = random_probe(n, o.seed + 1);
  }
  if (p.U.size() == 0)
  {
    p.U = random_probes(n, xi, o.seed + 2);
  }
  if (p.V.size() == 0)
  {
    p.V = random_probes(n, xi, o.seed + 3);
  }
  return p;
}

json clusters_json(const std::vector<EigenCluster> &cl)
{
  json a = json::array();
  for (const auto &c : cl)
  {
    a.push_back({{"value", to_json(c.value)}, {"multiplicity", c.multiplicity}, {"spread", c.spread}});
  }
  return a;
}

Matrix perturbed(const Matrix &A, double eps, std::mt19937_64 &rng)
{
  if (eps == 0.0)
  {
    return A;
  }
  const Matrix G = random_matrix(A.rows(), A.cols(), rng);
  return A + eps * std::max(A.norm(), 1.0) / G.norm() * G;
}

// Pair from --pair-file, or extracted from the contour (scalar probes).
InvariantPair obtain_pair(const MatrixPolynomial &P, const Options &o)
{
  if (!o.pair_file.empty())
  {
    const json j = read_json_file(o.pair_file);
    if (!j.contains("S"))
    {
      throw ParseError(o.pair_file, "missing field \"S\"");
    }
    Matrix S = matrix_from_json(j["S"], o.pair_file + ".S");
    Matrix X = j.contains("X") ? matrix_from_json(j["X"], o.pair_file + ".X")
                               : Matrix(Matrix::Identity(P.size(), P.size()));
    return InvariantPair(std::move(X), std::move(S));
  }
  const Contour c = make_contour(o);
  const Probes pr = load_probes(o, P.size(), o.xi);
  const int m = o.m > 0 ? o.m : choose_pencil_size(P, c, pr.u, pr.v, static_cast<int>(P.size()) * P.degree());
  return extract_invariant_pair(P, c, pr.u, pr.v, m);
}

void cmd_count(const Options &o, Output &out, std::ostream &err)
{
  const auto pf = parse_problem(o.problem);
  const auto r = count_eigenvalues_inside(pf.P, make_contour(o));
  out.doc = {{"count", r.count}, {"raw", to_json(r.raw)}, {"quality", r.quality},
             {"reliable", r.reliable()}};
  if (!r.reliable())
  {
    err << "warning: count quality " << r.quality << " > 0.1; increase N or move contour\n";
  }
  out.csv_header = {"count", "raw", "quality"};
  out.csv_rows.push_back({std::to_string(r.count), format_complex(r.raw), format_real(r.quality)});
}

void cmd_moments(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const Probes pr = load_probes(o, pf.P.size(), o.xi);
  const int K = o.count > 0 ? o.count : (o.m > 0 ? 2 * o.m : 8);
  const auto ms = scalar_moments(pf.P, make_contour(o), pr.u, pr.v, K);
  json mu = json::array();
  out.csv_header = {"k", "mu"};
  for (std::size_t k = 0; k < ms.mu.size(); k++)
  {
    mu.push_back(to_json(ms.mu[k]));
    out.csv_rows.push_back({std::to_string(k), format_complex(ms.mu[k])});
  }
  out.doc = {{"mu", mu}};
}

void pair_output(const MatrixPolynomial &P, const InvariantPair &pair, Output &out)
{
  const double res = relative_residual(P, pair.X(), pair.S());
  const auto cl = cluster_eigenvalues(eigenvalues(pair.S()));
  out.doc = {{"X", to_json(pair.X())},
             {"S", to_json(pair.S())},
             {"k", pair.k()},
             {"relative_residual", res},
             {"eigenvalues", clusters_json(cl)}};
  out.csv_header = {"entity", "row", "col", "value"};
  out.matrix_csv("X", pair.X());
  out.matrix_csv("S", pair.S());
  out.csv_rows.push_back({"relative_residual", "0", "0", format_real(res)});
}

void cmd_pair(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const Contour c = make_contour(o);
  const Probes pr = load_probes(o, pf.P.size(), o.xi);
  const int m = o.m > 0 ? o.m
                        : choose_pencil_size(pf.P, c, pr.u, pr.v,
                                             static_cast<int>(pf.P.size()) * pf.P.degree());
  pair_output(pf.P, extract_invariant_pair(pf.P, c, pr.u, pr.v, m), out);
}

void cmd_block_pair(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const Contour c = make_contour(o);
  const Probes pr = load_probes(o, pf.P.size(), o.xi);
  int m = o.m;
  if (m <= 0)
  {
    const auto cnt = count_eigenvalues_inside(pf.P, c);
    if (!cnt.reliable() || cnt.count < 1)
    {
      throw InvalidArgument("cannot determine the pencil size from the eigenvalue count; pass --m");
    }
    m = cnt.count;
  }
  pair_output(pf.P, extract_block_invariant_pair(pf.P, c, pr.U, pr.V, m), out);
}

json report_json(const RefinementReport &r, bool timing)
{
  json j = {{"iterations", r.iterations},
            {"residual_history", r.residual_history},
            {"step_lengths", r.step_lengths},
            {"converged", r.converged},
            {"warnings", r.warnings}};
  if (timing)
  {
    j["wall_time"] = r.wall_time;
  }
  return j;
}

void report_csv(const RefinementReport &r, Output &out)
{
  out.csv_header = {"iteration", "residual", "log10_residual", "step"};
  for (std::size_t i = 0; i < r.residual_history.size(); i++)
  {
    const double res = r.residual_history[i];
    out.csv_rows.push_back({std::to_string(i), format_real(res),
                            format_real(res > 0 ? std::log10(res) : -INFINITY),
                            i < r.step_lengths.size() ? format_real(r.step_lengths[i]) : ""});
  }
}

RefineOptions refine_options(const Options &o)
{
  RefineOptions ro;
  ro.tol = o.tol;
  ro.maxit = o.maxit;
  ro.line_search = !o.no_line_search;
  return ro;
}

void cmd_refine(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const InvariantPair p0 = obtain_pair(pf.P, o);
  std::mt19937_64 rng(o.seed);
  const Matrix X0 = perturbed(p0.X(), o.perturb, rng);
  const Matrix S0 = perturbed(p0.S(), o.perturb, rng);
  const auto res = refine_pair(pf.P, X0, S0, refine_options(o));
  out.doc = report_json(res.report, o.timing);
  out.doc["X"] = to_json(res.pair.X());
  out.doc["S"] = to_json(res.pair.S());
  report_csv(res.report, out);
}

void cmd_cond(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const auto w = WeightVector::from_norms(pf.P);
  const InvariantPair p = obtain_pair(pf.P, o);
  const bool solvent = !o.pair_file.empty() && !read_json_file(o.pair_file).contains("X");
  const auto k = solvent ? solvent_condition_number(pf.P, p.S(), w)
                         : pair_condition_number(pf.P, p.X(), p.S(), w);
  out.doc = {{"kappa", k.value}, {"full_rank", k.full_rank}, {"kind", solvent ? "solvent" : "pair"}};
  out.csv_header = {"quantity", "value"};
  out.csv_rows.push_back({"kappa", format_real(k.value)});
  out.csv_rows.push_back({"full_rank", k.full_rank ? "true" : "false"});
}

void cmd_berr(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const auto w = WeightVector::from_norms(pf.P);
  const InvariantPair p = obtain_pair(pf.P, o);
  const bool solvent = !o.pair_file.empty() && !read_json_file(o.pair_file).contains("X");
  const auto b = solvent ? solvent_backward_error(pf.P, p.S(), w)
                         : pair_backward_error(pf.P, p.X(), p.S(), w);
  out.doc = {{"lower", b.lower},
             {"upper", std::isfinite(b.upper) ? json(b.upper) : json("inf")},
             {"eta", b.eta ? json(*b.eta) : json(nullptr)},
             {"kind", solvent ? "solvent" : "pair"}};
  out.csv_header = {"lower", "eta", "upper"};
  out.csv_rows.push_back({format_real(b.lower), b.eta ? format_real(*b.eta) : "",
                          format_real(b.upper)});
}

void solvent_csv(const std::vector<Solvent> &s, Output &out)
{
  out.csv_header = {"entity", "row", "col", "value"};
  for (std::size_t i = 0; i < s.size(); i++)
  {
    out.matrix_csv("S" + std::to_string(i), s[i].S);
  }
}

void cmd_solvent(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  Options o2 = o;
  if (o2.m == 0 && o2.pair_file.empty())
  {
    o2.m = static_cast<int>(pf.P.size());
  }
  const InvariantPair p = obtain_pair(pf.P, o2);
  Solvent s = solvent_from_pair(pf.P, p);
  const auto chk = verify_solvent(pf.P, s.S, 1e-8);
  out.doc = {{"S", to_json(s.S)},
             {"residual", s.residual},
             {"relative_residual", chk.residual},
             {"certified", chk.certified}};
  solvent_csv({s}, out);
}

void cmd_enumerate(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const auto en = enumerate_solvents(pf.P, polynomial_eigenpairs(pf.P));
  json sols = json::array(), rej = json::array();
  for (std::size_t i = 0; i < en.solvents.size(); i++)
  {
    sols.push_back({{"S", to_json(en.solvents[i].S)},
                    {"residual", en.solvents[i].residual},
                    {"eigenpairs", en.subsets[i]}});
  }
  for (const auto &r : en.rejected)
  {
    rej.push_back({{"eigenpairs", r.indices},
                   {"condition", std::isfinite(r.condition) ? json(r.condition) : json("inf")}});
  }
  out.doc = {{"solvents", sols}, {"rejected", rej}};
  solvent_csv(en.solvents, out);
}

void cmd_triangular(const Options &o, Output &out)
{
  const auto pf = parse_problem(o.problem);
  const auto branches = triangular_solvent_solve(pf.P);
  std::optional<Matrix> M;
  std::optional<MatrixPolynomial> target;
  if (!o.transform_file.empty())
  {
    const json j = read_json_file(o.transform_file);
    if (!j.contains("M") || !j.contains("problem"))
    {
      throw ParseError(o.transform_file, "expected fields \"M\" and \"problem\"");
    }
    M = matrix_from_json(j["M"], o.transform_file + ".M");
    const fs::path base = fs::path(o.transform_file).parent_path();
    target = parse_problem((base / j["problem"].get<std::string>()).string()).P;
  }
  json arr = json::array();
  out.csv_header = {"entity", "row", "col", "value"};
  for (std::size_t b = 0; b < branches.size(); b++)
  {
    const auto &br = branches[b];
    json d = json::array();
    for (const auto &x : br.diagonal)
    {
      d.push_back(to_json(x));
    }
    json e = {{"diagonal", d}, {"kind", to_string(br.family.kind)}};
    if (br.family.kind == FamilyKind::none)
    {
      e["reason"] = br.family.reason;
    }
    else
    {
      e["base"] = to_json(br.family.base);
      json dirs = json::array();
      for (const auto &D : br.family.directions)
      {
        dirs.push_back(to_json(D));
      }
      e["directions"] = dirs;
      out.matrix_csv("branch" + std::to_string(b) + ".base", br.family.base);
      if (M)
      {
        try
        {
          const Solvent s = solvent_from_triangular(*target, *M, br.family.base);
          e["solvent"] = {{"S", to_json(s.S)}, {"residual", s.residual}};
        }
        catch (const Error &ex)
        {
          e["solvent"] = {{"error", ex.what()}};
        }
      }
    }
    arr.push_back(std::move(e));
  }
  out.doc = {{"branches", arr}};
}

void cmd_bench(const Options &o, Output &out, std::ostream &err, int &code)
{
  const auto rows = run_bench(o.data_dir, o.seed, o.tol, o.maxit);
  json arr = json::array();
  out.csv_header = {"problem", "n", "k", "nm_iterations", "nm_converged", "nmls_iterations",
                    "nmls_converged"};
  if (o.timing)
  {
    out.csv_header.insert(out.csv_header.begin() + 5, "nm_time");
    out.csv_header.push_back("nmls_time");
  }
  int wins = 0;
  for (const auto &r : rows)
  {
    json j = {{"problem", r.name},
              {"n", r.n},
              {"k", r.k},
              {"nm", {{"iterations", r.plain_iterations}, {"converged", r.plain_converged},
                      {"residual", r.plain_residual}}},
              {"nmls", {{"iterations", r.ls_iterations}, {"converged", r.ls_converged},
                        {"residual", r.ls_residual}}}};
    std::vector<std::string> row{r.name,
                                 std::to_string(r.n),
                                 std::to_string(r.k),
                                 r.plain_converged ? std::to_string(r.plain_iterations) : "N.C.",
                                 r.plain_converged ? "true" : "false",
                                 r.ls_converged ? std::to_string(r.ls_iterations) : "N.C.",
                                 r.ls_converged ? "true" : "false"};
    if (o.timing)
    {
      j["nm"]["time"] = r.plain_time;
      j["nmls"]["time"] = r.ls_time;
      row.insert(row.begin() + 5, format_real(r.plain_time));
      row.push_back(format_real(r.ls_time));
    }
    wins += r.ls_iterations <= r.plain_iterations ? 1 : 0;
    arr.push_back(std::move(j));
    out.csv_rows.push_back(std::move(row));
  }
  out.doc = {{"rows", arr},
             {"line_search_not_worse", wins},
             {"total", rows.size()},
             {"seed", o.seed}};
  if (o.verify)
  {
    json checks = json::array();
    for (const auto &v : verify_expected(o.data_dir))
    {
      checks.push_back({{"name", v.name}, {"ok", v.ok}, {"detail", v.detail}});
      if (!v.ok)
      {
        err << "verify: " << v.name << " failed: " << v.detail << "\n";
        code = kMismatch;
      }
    }
    out.doc["verify"] = checks;
  }
}

std::string csv_escape(const std::string &s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
  {
    return s;
  }
  std::string r = "\"";
  for (char ch : s)
  {
    r += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  }
  return r + "\"";
}

void emit(const Options &o, const Output &out, std::ostream &os)
{
  std::ostringstream ss;
  if (o.format == "csv")
  {
    for (std::size_t i = 0; i < out.csv_header.size(); i++)
    {
      ss << (i ? "," : "") << csv_escape(out.csv_header[i]);
    }
    ss << "\n";
    for (const auto &row : out.csv_rows)
    {
      for (std::size_t i = 0; i < row.size(); i++)
      {
        ss << (i ? "," : "") << csv_escape(row[i]);
      }
      ss << "\n";
    }
  }
  else
  {
    ss << out.doc.dump(2) << "\n";
  }
  if (o.out.empty())
  {
    os << ss.str();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f)
  {
    throw UsageError("cannot write " + o.out);
  }
  f << ss.str();
}

}  // namespace

int run_command(const std::vector<std::string> &args, std::ostream &out_stream, std::ostream &err)
{
  Options o;
  CLI::App app{"Invariant pairs and solvents of matrix polynomials"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App *sub, bool problem, bool contour)
  {
    if (problem)
    {
      sub->add_option("problem", o.problem, "problem file (JSON)")->required()->check(CLI::ExistingFile);
    }
    if (contour)
    {
      sub->add_option("--center", o.center, "contour center re,im");
      sub->add_option("--radius", o.radius, "contour radius");
      sub->add_option("--nodes", o.nodes, "quadrature nodes");
      sub->add_option("--m", o.m, "pencil size (number of eigenvalues)");
      sub->add_option("--probe-file", o.probe_file, "JSON file with probes u, v, U, V")
        ->check(CLI::ExistingFile);
    }
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output file");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto pair_source = [&](CLI::App *sub)
  { sub->add_option("--pair-file", o.pair_file, "JSON file with X and S (S only: solvent)")->check(CLI::ExistingFile); };
  auto newton = [&](CLI::App *sub)
  {
    sub->add_option("--tol", o.tol, "relative residual tolerance");
    sub->add_option("--maxit", o.maxit, "maximum iterations");
  };

  auto *count = app.add_subcommand("count", "number of eigenvalues inside the contour");
  common(count, true, true);
  auto *moments = app.add_subcommand("moments", "scalar moments");
  common(moments, true, true);
  moments->add_option("--count", o.count, "number of moments");
  auto *pair = app.add_subcommand("pair", "invariant pair from scalar moments");
  common(pair, true, true);
  auto *bpair = app.add_subcommand("block-pair", "invariant pair from block moments");
  common(bpair, true, true);
  bpair->add_option("--xi", o.xi, "block size");
  auto *refine = app.add_subcommand("refine", "Newton refinement of an invariant pair");
  common(refine, true, true);
  pair_source(refine);
  newton(refine);
  refine->add_flag("--no-line-search", o.no_line_search, "plain Newton (t = 1)");
  refine->add_option("--perturb", o.perturb, "relative perturbation of the starting pair");
  refine->add_flag("--timing", o.timing, "include wall time");
  auto *cond = app.add_subcommand("cond", "condition number");
  common(cond, true, true);
  pair_source(cond);
  auto *berr = app.add_subcommand("berr", "backward error and bounds");
  common(berr, true, true);
  pair_source(berr);
  auto *solvent = app.add_subcommand("solvent", "solvent from an n x n invariant pair");
  common(solvent, true, true);
  pair_source(solvent);
  auto *enumerate = app.add_subcommand("enumerate", "all solvents from eigenpair subsets");
  common(enumerate, true, false);
  auto *tri = app.add_subcommand("triangular", "solvents of an upper triangular polynomial");
  common(tri, true, false);
  tri->add_option("--transform", o.transform_file,
                  "JSON with M and the original problem, to map solvents back")
    ->check(CLI::ExistingFile);
  auto *bench = app.add_subcommand("bench", "Newton vs Newton with line search");
  common(bench, false, false);
  newton(bench);
  bench->add_flag("--verify", o.verify, "check the golden expected outputs");
  bench->add_flag("--timing", o.timing, "include wall times");
  bench->add_option("--data-dir", o.data_dir, "fixture directory");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try
  {
    app.parse(std::move(rev));
  }
  catch (const CLI::CallForHelp &)
  {
    out_stream << app.help();
    return kSuccess;
  }
  catch (const CLI::CallForAllHelp &)
  {
    out_stream << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  }
  catch (const CLI::ParseError &e)
  {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  Output out;
  int code = kSuccess;
  try
  {
    if (*count)
      cmd_count(o, out, err);
    else if (*moments)
      cmd_moments(o, out);
    else if (*pair)
      cmd_pair(o, out);
    else if (*bpair)
      cmd_block_pair(o, out);
    else if (*refine)
      cmd_refine(o, out);
    else if (*cond)
      cmd_cond(o, out);
    else if (*berr)
      cmd_berr(o, out);
    else if (*solvent)
      cmd_solvent(o, out);
    else if (*enumerate)
      cmd_enumerate(o, out);
    else if (*tri)
      cmd_triangular(o, out);
    else if (*bench)
      cmd_bench(o, out, err, code);
    emit(o, out, out_stream);
  }
  catch (const UsageError &e)
  {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  catch (const ParseError &e)
  {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  catch (const VerificationError &e)
  {
    err << "error: " << e.what() << "\n";
    return kMismatch;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return code;
}

}  // namespace invpair::cli
