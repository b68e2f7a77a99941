#pragma once

#include "dppmm/core.hpp"

namespace dppmm {

//! Unit-norm projection direction.
class Direction
{
public:
  //! Normalises `v`; throws InvalidInput for a zero or non-finite vector.
  explicit Direction(Vector v);

  //! Stores `v` unchanged after checking that it has unit norm (to 1e-12);
  //! used when reading stored models so values survive bit-exactly.
  static Direction from_unit(Vector v);

  const Vector& components() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }

private:
  Vector v_;
};

struct SaveDiagnostics
{
  double top_eigenvalue = 0.0;
  bool informative = false;
};

struct SaveResult
{
  Direction direction;
  SaveDiagnostics diagnostics;
};

inline constexpr double kDefaultRidge = 1e-8;
inline constexpr double kInformativeThreshold = 1e-10;

//! Two-slice sliced average variance estimation between the rows of `x` and
//! `y`. The samples are whitened with the pooled covariance (plus `ridge`),
//! the discrepancy matrix
//!   M = 1/2 [ W(S - S_x)W ]^2 + 1/2 [ W(S - S_y)W ]^2,   W = (S + ridge I)^-1/2
//! is formed and its leading eigenvector is mapped back by W. With ridge = 0,
//! W(S - S_x)W = I - cov(whitened x).
SaveResult save_direction(const Matrix& x,
                          const Matrix& y,
                          double ridge = kDefaultRidge);

//! Flips the sign so that the first non-negligible component is positive.
Vector canonical_sign(Vector v);

} // namespace dppmm
