#pragma once

#include <stdexcept>
#include <string>

namespace dppmm {

//! Bad arguments or data that violate a documented precondition.
class InvalidInput : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! A numerical routine failed (eigen-solver breakdown, SDE blow-up, ...).
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Evaluation requested outside the valid domain (e.g. spline time range).
class OutOfRange : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

} // namespace dppmm
