// SPDX-License-Identifier: Apache-2.0

#include "invpair/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "invpair/error.hpp"

namespace invpair
{

using nlohmann::json;

namespace
{

std::string idx(const std::string &where, std::size_t i)
{
  return where + "[" + std::to_string(i) + "]";
}

const json &field(const json &j, const char *key, const std::string &where)
{
  if (!j.is_object())
  {
    throw ParseError(where, "expected an object");
  }
  auto it = j.find(key);
  if (it == j.end())
  {
    throw ParseError(where, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

long long integer_field(const json &j, const char *key, const std::string &where)
{
  const json &v = field(j, key, where);
  if (!v.is_number_integer())
  {
    throw ParseError(where + "." + key, "expected an integer");
  }
  return v.get<long long>();
}

json parse_json(const std::string &text, const std::string &source)
{
  try
  {
    return json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); i++)
    {
      if (text[i] == '\n')
      {
        line++;
        col = 1;
      }
      else
      {
        col++;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col),
                     text.empty() ? "empty input" : "malformed JSON");
  }
}

}  // namespace

Complex complex_from_json(const json &j, const std::string &where)
{
  if (j.is_number())
  {
    return {j.get<double>(), 0.0};
  }
  if (!j.is_array() || j.size() != 2)
  {
    throw ParseError(where, "expected a [re, im] pair");
  }
  for (std::size_t i = 0; i < 2; i++)
  {
    if (!j[i].is_number())
    {
      throw ParseError(idx(where, i), "non-numeric entry");
    }
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Matrix matrix_from_json(const json &j, const std::string &where)
{
  if (!j.is_array() || j.empty())
  {
    throw ParseError(where, "expected a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
  {
    throw ParseError(idx(where, 0), "expected a nonempty row");
  }
  const std::size_t cols = j[0].size();
  Matrix A(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; r++)
  {
    const std::string wr = idx(where, r);
    if (!j[r].is_array() || j[r].size() != cols)
    {
      throw ParseError(wr, "expected a row of " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; c++)
    {
      A(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(j[r][c], idx(wr, c));
    }
  }
  return A;
}

Vector vector_from_json(const json &j, const std::string &where)
{
  if (!j.is_array() || j.empty())
  {
    throw ParseError(where, "expected a nonempty array");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); i++)
  {
    v(static_cast<Index>(i)) = complex_from_json(j[i], idx(where, i));
  }
  return v;
}

json to_json(Complex z)
{
  return json::array({z.real(), z.imag()});
}

json to_json(const Matrix &A)
{
  json rows = json::array();
  for (Index r = 0; r < A.rows(); r++)
  {
    json row = json::array();
    for (Index c = 0; c < A.cols(); c++)
    {
      row.push_back(to_json(A(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector &v)
{
  json out = json::array();
  for (Index i = 0; i < v.size(); i++)
  {
    out.push_back(to_json(v(i)));
  }
  return out;
}

json read_json_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw ParseError(path, "cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

ProblemFile parse_problem_text(const std::string &text, const std::string &source)
{
  const json j = parse_json(text, source);
  const std::string root = source;
  const long long n = integer_field(j, "n", root);
  const long long degree = integer_field(j, "degree", root);
  if (n < 1)
  {
    throw ParseError(root + ".n", "must be positive");
  }
  if (degree < 1)
  {
    throw ParseError(root + ".degree", "must be positive");
  }
  const json &coeffs = field(j, "coeffs", root);
  const std::string wc = root + ".coeffs";
  if (!coeffs.is_array() || coeffs.size() != static_cast<std::size_t>(degree) + 1)
  {
    throw ParseError(wc, "expected " + std::to_string(degree + 1) + " coefficient matrices, got " +
                             (coeffs.is_array() ? std::to_string(coeffs.size()) : "non-array"));
  }
  std::vector<Matrix> A;
  for (std::size_t p = 0; p < coeffs.size(); p++)
  {
    Matrix M = matrix_from_json(coeffs[p], idx(wc, p));
    if (M.rows() != n || M.cols() != n)
    {
      throw ParseError(idx(wc, p), "expected " + std::to_string(n) + "x" + std::to_string(n) +
                                       ", got " + std::to_string(M.rows()) + "x" +
                                       std::to_string(M.cols()));
    }
    A.push_back(std::move(M));
  }
  ProblemFile pf{j.value("name", std::string()), j.value("description", std::string()),
                 MatrixPolynomial(std::move(A))};
  return pf;
}

ProblemFile parse_problem(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw ParseError(path, "cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str(), path);
}

std::string serialize(const ProblemFile &pf)
{
  json j;
  j["name"] = pf.name;
  j["description"] = pf.description;
  j["n"] = pf.P.size();
  j["degree"] = pf.P.degree();
  json coeffs = json::array();
  for (const auto &A : pf.P.coeffs())
  {
    coeffs.push_back(to_json(A));
  }
  j["coeffs"] = std::move(coeffs);
  return j.dump(1) + "\n";
}

std::string format_real(double x)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_complex(Complex z)
{
  std::string s = format_real(z.real());
  const double im = z.imag();
  if (std::signbit(im))
  {
    s += "-" + format_real(-im);
  }
  else
  {
    s += "+" + format_real(im);
  }
  return s + "i";
}

}  // namespace invpair
