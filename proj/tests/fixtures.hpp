// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "invpair/io.hpp"
#include "oracles.hpp"

namespace fixture
{

inline invpair::MatrixPolynomial problem(const std::string &name)
{
  return invpair::parse_problem(oracle::data_path(name + ".json")).P;
}

struct Probes
{
  invpair::Vector u, v;
  invpair::Matrix U, V;
};

inline Probes probes(const std::string &name)
{
  const auto j = invpair::read_json_file(oracle::data_path(name + "_probes.json"));
  Probes p;
  if (j.contains("u"))
    p.u = invpair::vector_from_json(j["u"], "u");
  if (j.contains("v"))
    p.v = invpair::vector_from_json(j["v"], "v");
  if (j.contains("U"))
    p.U = invpair::matrix_from_json(j["U"], "U");
  if (j.contains("V"))
    p.V = invpair::matrix_from_json(j["V"], "V");
  return p;
}

}  // namespace fixture
