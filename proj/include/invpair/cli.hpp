// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace invpair::cli
{

enum ExitCode : int
{
  kSuccess = 0,
  kUsage = 1,
  kNumerical = 2,
  kMismatch = 3,
};

// Runs one subcommand. args excludes the program name.
int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

struct BenchRow
{
  std::string name;
  long n = 0;
  long k = 0;
  int plain_iterations = 0;
  double plain_time = 0.0;
  bool plain_converged = false;
  double plain_residual = 0.0;
  int ls_iterations = 0;
  double ls_time = 0.0;
  bool ls_converged = false;
  double ls_residual = 0.0;
};

// Newton vs Newton with line search over the bundled corpus.
std::vector<BenchRow> run_bench(const std::string &data_dir, unsigned long long seed,
                                double tol, int maxit);

struct VerifyResult
{
  std::string name;
  bool ok = false;
  std::string detail;
};

// Checks every data_dir/expected/*.json against a fresh computation.
std::vector<VerifyResult> verify_expected(const std::string &data_dir);

}  // namespace invpair::cli
