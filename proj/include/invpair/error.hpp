// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

#include "invpair/types.hpp"

namespace invpair
{

// Base class for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something outside an operation's domain (zero probe, bad
// contour, malformed weights, ...).
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

// A matrix that must be inverted is numerically singular.
class SingularMatrixError : public Error
{
public:
  SingularMatrixError(const std::string &what, double condition)
    : Error(what), condition_(condition)
  {
  }
  double condition() const noexcept { return condition_; }

private:
  double condition_;
};

// An eigenvalue lies on or close to the integration contour; node() is the
// quadrature node whose evaluation was ill conditioned.
class NearContourError : public Error
{
public:
  NearContourError(const std::string &what, int node) : Error(what), node_(node) {}
  int node() const noexcept { return node_; }

private:
  int node_;
};

// A Hankel matrix (or probe block) has lower numerical rank than requested.
// rank() is the detected numerical rank, suitable for truncation.
class RankDeficientError : public Error
{
public:
  RankDeficientError(const std::string &what, Index rank, Index requested)
    : Error(what), rank_(rank), requested_(requested)
  {
  }
  Index rank() const noexcept { return rank_; }
  Index requested() const noexcept { return requested_; }

private:
  Index rank_;
  Index requested_;
};

// A computed result failed its own residual check.
class VerificationError : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(const std::string &where, const std::string &what)
    : Error(where.empty() ? what : where + ": " + what), where_(where)
  {
  }
  const std::string &where() const noexcept { return where_; }

private:
  std::string where_;
};

}  // namespace invpair
