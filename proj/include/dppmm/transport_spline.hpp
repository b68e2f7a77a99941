#pragma once

#include "dppmm/core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace dppmm {

enum class SplineBoundary
{
  linear,     //!< M = 2
  quadratic,  //!< M = 3, the parabola through the three knots
  not_a_knot  //!< M >= 4
};

std::string_view to_string(SplineBoundary b);

//! Cubic interpolants of every trajectory (row) and coordinate (column)
//! through the coupled snapshots. Stored as knot values plus second
//! derivatives at the knots; all trajectories share the knot times.
class SplineBundle
{
public:
  SplineBundle(std::vector<double> times,
               std::vector<Matrix> values,
               std::vector<Matrix> second_derivatives,
               SplineBoundary boundary);

  const std::vector<double>& times() const { return times_; }
  SplineBoundary boundary() const { return boundary_; }
  Eigen::Index trajectories() const { return values_.front().rows(); }
  Eigen::Index dim() const { return values_.front().cols(); }
  const std::vector<Matrix>& second_derivatives() const { return second_; }

  //! Row n is p_n(t). Throws OutOfRange outside [t_1, t_M].
  Matrix operator()(double t) const;

private:
  std::vector<double> times_;
  std::vector<Matrix> values_;
  std::vector<Matrix> second_;
  SplineBoundary boundary_;
};

//! `coupled[j]` holds the trajectories at times[j]; row n is trajectory n.
SplineBundle fit_transport_splines(std::span<const double> times,
                                   std::span<const Matrix> coupled);

inline Matrix
interpolate(const SplineBundle& bundle, double t)
{
  return bundle(t);
}

} // namespace dppmm
