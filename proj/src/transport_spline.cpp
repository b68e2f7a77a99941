#include "dppmm/transport_spline.hpp"

#include <algorithm>
#include <string>

namespace dppmm {

std::string_view
to_string(SplineBoundary b)
{
  switch (b) {
    case SplineBoundary::linear:
      return "linear";
    case SplineBoundary::quadratic:
      return "quadratic";
    case SplineBoundary::not_a_knot:
      return "not_a_knot";
  }
  return "unknown";
}

SplineBundle::SplineBundle(std::vector<double> times,
                           std::vector<Matrix> values,
                           std::vector<Matrix> second_derivatives,
                           SplineBoundary boundary)
  : times_(std::move(times))
  , values_(std::move(values))
  , second_(std::move(second_derivatives))
  , boundary_(boundary)
{}

namespace {

// Linear operator S (M x M) with m = S y, where m are the knot second
// derivatives of the interpolant through values y at `t`.
Matrix
second_derivative_operator(std::span<const double> t, SplineBoundary boundary)
{
  const auto M = static_cast<Eigen::Index>(t.size());
  if (boundary == SplineBoundary::linear)
    return Matrix::Zero(M, M);

  std::vector<double> h(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    h[i] = t[i + 1] - t[i];

  Matrix A = Matrix::Zero(M, M);
  Matrix R = Matrix::Zero(M, M); // rhs = R * y
  for (Eigen::Index j = 1; j + 1 < M; ++j) {
    const double hl = h[static_cast<std::size_t>(j - 1)];
    const double hr = h[static_cast<std::size_t>(j)];
    A(j, j - 1) = hl;
    A(j, j) = 2.0 * (hl + hr);
    A(j, j + 1) = hr;
    R(j, j - 1) = 6.0 / hl;
    R(j, j) = -6.0 / hl - 6.0 / hr;
    R(j, j + 1) = 6.0 / hr;
  }

  if (boundary == SplineBoundary::quadratic) {
    // constant second derivative: a single parabola
    A(0, 0) = 1.0;
    A(0, 1) = -1.0;
    A(M - 1, M - 2) = 1.0;
    A(M - 1, M - 1) = -1.0;
  } else {
    // third derivative continuous across the second and penultimate knots
    A(0, 0) = -1.0 / h[0];
    A(0, 1) = 1.0 / h[0] + 1.0 / h[1];
    A(0, 2) = -1.0 / h[1];
    const auto n = h.size();
    A(M - 1, M - 3) = -1.0 / h[n - 2];
    A(M - 1, M - 2) = 1.0 / h[n - 2] + 1.0 / h[n - 1];
    A(M - 1, M - 1) = -1.0 / h[n - 1];
  }
  return A.fullPivLu().solve(R);
}

} // namespace

SplineBundle
fit_transport_splines(std::span<const double> times,
                      std::span<const Matrix> coupled)
{
  const std::size_t M = times.size();
  if (M < 2)
    throw InvalidInput("transport splines need at least two knot times");
  if (coupled.size() != M)
    throw InvalidInput("transport splines: one snapshot per knot time needed");
  for (std::size_t j = 1; j < M; ++j)
    if (!(times[j] > times[j - 1]))
      throw InvalidInput("transport spline knot times must increase");
  const auto N = coupled[0].rows();
  const auto d = coupled[0].cols();
  for (std::size_t j = 0; j < M; ++j)
    if (coupled[j].rows() != N || coupled[j].cols() != d)
      throw InvalidInput("transport splines: snapshot " + std::to_string(j) +
                         " has a different shape (trajectories must be "
                         "row-aligned)");

  const SplineBoundary boundary = M == 2   ? SplineBoundary::linear
                                  : M == 3 ? SplineBoundary::quadratic
                                           : SplineBoundary::not_a_knot;
  const Matrix S = second_derivative_operator(times, boundary);

  std::vector<Matrix> second(M, Matrix::Zero(N, d));
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t i = 0; i < M; ++i) {
      const double w = S(static_cast<Eigen::Index>(j),
                         static_cast<Eigen::Index>(i));
      if (w != 0.0)
        second[j] += w * coupled[i];
    }

  return SplineBundle(std::vector<double>(times.begin(), times.end()),
                      std::vector<Matrix>(coupled.begin(), coupled.end()),
                      std::move(second), boundary);
}

Matrix
SplineBundle::operator()(double t) const
{
  if (!(t >= times_.front() && t <= times_.back()))
    throw OutOfRange("interpolation time " + std::to_string(t) +
                     " outside [" + std::to_string(times_.front()) + ", " +
                     std::to_string(times_.back()) + "]");

  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  auto i = static_cast<std::size_t>(it - times_.begin());
  if (i >= times_.size())
    return values_.back();
  if (t == times_[i - 1])
    return values_[i - 1];
  i -= 1;

  const double h = times_[i + 1] - times_[i];
  const double a = (times_[i + 1] - t) / h;
  const double b = (t - times_[i]) / h;
  const double ca = (a * a * a - a) * h * h / 6.0;
  const double cb = (b * b * b - b) * h * h / 6.0;
  return a * values_[i] + b * values_[i + 1] + ca * second_[i] +
         cb * second_[i + 1];
}

} // namespace dppmm
