// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "invpair/matpoly.hpp"

namespace invpair
{

struct ProblemFile
{
  std::string name;
  std::string description;
  MatrixPolynomial P;
};

// JSON problem format:
//   { "name": ..., "description": ..., "n": 2, "degree": 2,
//     "coeffs": [A_0, ..., A_l] }
// where every matrix is an array of rows and every entry a [re, im] pair.
ProblemFile parse_problem(const std::string &path);
ProblemFile parse_problem_text(const std::string &text, const std::string &source = "<string>");
std::string serialize(const ProblemFile &pf);

nlohmann::json read_json_file(const std::string &path);

// Field-level helpers; `where` names the JSON path for diagnostics.
Complex complex_from_json(const nlohmann::json &j, const std::string &where);
Matrix matrix_from_json(const nlohmann::json &j, const std::string &where);
Vector vector_from_json(const nlohmann::json &j, const std::string &where);

nlohmann::json to_json(Complex z);
nlohmann::json to_json(const Matrix &A);
nlohmann::json to_json(const Vector &v);

// "re+imi" / "re-imi" with round-trip precision.
std::string format_complex(Complex z);
std::string format_real(double x);

}  // namespace invpair
