#include "dppmm/transport_spline.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace dppmm;

namespace {

// coupled[j](n, k) = poly evaluated at times[j] with row/column dependent
// coefficients
std::vector<Matrix>
polynomial_paths(const std::vector<double>& times, Eigen::Index n,
                 Eigen::Index d, int degree)
{
  const Matrix coef = oracle::normal_matrix(n * d, degree + 1, 42);
  std::vector<Matrix> out;
  for (double t : times) {
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        double v = 0.0;
        for (int p = degree; p >= 0; --p)
          v = v * t + coef(i * d + k, p);
        m(i, k) = v;
      }
    out.push_back(m);
  }
  return out;
}

double
max_rel_err(const Matrix& a, const Matrix& b)
{
  return ((a - b).array().abs() / (1.0 + b.array().abs())).maxCoeff();
}

} // namespace

TEST_CASE("knots are reproduced for every boundary rule")
{
  for (std::size_t M : { 2u, 3u, 4u, 7u }) {
    std::vector<double> times;
    for (std::size_t j = 0; j < M; ++j)
      times.push_back(0.1 * static_cast<double>(j * j) + 0.05 * j);
    std::vector<Matrix> coupled;
    for (std::size_t j = 0; j < M; ++j)
      coupled.push_back(oracle::normal_matrix(20, 3, 100 + j));
    const auto bundle = fit_transport_splines(times, coupled);
    for (std::size_t j = 0; j < M; ++j)
      CHECK(max_rel_err(bundle(times[j]), coupled[j]) <= 1e-9);
  }
}

TEST_CASE("boundary rule depends on the number of knots")
{
  auto rule = [](std::size_t M) {
    std::vector<double> t;
    for (std::size_t j = 0; j < M; ++j)
      t.push_back(static_cast<double>(j));
    return fit_transport_splines(t, std::vector<Matrix>(M, Matrix::Zero(1, 1)))
      .boundary();
  };
  CHECK(rule(2) == SplineBoundary::linear);
  CHECK(rule(3) == SplineBoundary::quadratic);
  CHECK(rule(4) == SplineBoundary::not_a_knot);
}

TEST_CASE("not-a-knot reproduces cubic paths")
{
  const std::vector<double> times = { 0.0, 0.1, 0.3, 0.45, 0.8, 1.0 };
  const auto coupled = polynomial_paths(times, 5, 2, 3);
  const auto bundle = fit_transport_splines(times, coupled);
  for (int k = 0; k < 100; ++k) {
    const double t = 0.005 + 0.0099 * k;
    const std::vector<double> tt = { t };
    const auto exact = polynomial_paths(tt, 5, 2, 3)[0];
    CHECK(max_rel_err(bundle(t), exact) <= 1e-8);
  }
}

TEST_CASE("three knots reproduce a parabola")
{
  const std::vector<double> times = { 0.0, 0.2, 1.0 };
  const auto coupled = polynomial_paths(times, 4, 2, 2);
  const auto bundle = fit_transport_splines(times, coupled);
  for (double t : { 0.05, 0.5, 0.9 }) {
    const std::vector<double> tt = { t };
    CHECK(max_rel_err(bundle(t), polynomial_paths(tt, 4, 2, 2)[0]) <= 1e-10);
  }
}

TEST_CASE("two knots interpolate linearly")
{
  const std::vector<double> times = { 0.0, 1.0 };
  const std::vector<Matrix> coupled = { oracle::normal_matrix(6, 2, 1),
                                        oracle::normal_matrix(6, 2, 2) };
  const auto bundle = fit_transport_splines(times, coupled);
  CHECK(max_rel_err(bundle(0.5), 0.5 * (coupled[0] + coupled[1])) <= 1e-14);
}

TEST_CASE("second derivative is continuous across interior knots")
{
  const std::vector<double> times = { 0.0, 0.2, 0.5, 0.6, 1.0 };
  std::vector<Matrix> coupled;
  for (std::size_t j = 0; j < times.size(); ++j)
    coupled.push_back(oracle::normal_matrix(3, 2, 50 + j));
  const auto bundle = fit_transport_splines(times, coupled);
  const double h = 1e-4;
  for (std::size_t j = 1; j + 1 < times.size(); ++j) {
    const double t = times[j];
    const Matrix left =
      (bundle(t) - 2.0 * bundle(t - h) + bundle(t - 2.0 * h)) / (h * h);
    const Matrix right =
      (bundle(t + 2.0 * h) - 2.0 * bundle(t + h) + bundle(t)) / (h * h);
    CHECK((left - right).cwiseAbs().maxCoeff() <= 1e-2 * (1.0 + left.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("evaluation outside the knot range and shape errors")
{
  const std::vector<double> times = { 0.0, 0.5, 1.0 };
  const std::vector<Matrix> coupled(3, Matrix::Zero(2, 2));
  const auto bundle = fit_transport_splines(times, coupled);
  CHECK_THROWS_AS(bundle(-1e-12), OutOfRange);
  CHECK_THROWS_AS(bundle(1.0 + 1e-12), OutOfRange);
  CHECK_NOTHROW(bundle(1.0));

  std::vector<Matrix> bad = coupled;
  bad[1] = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(fit_transport_splines(times, bad), InvalidInput);
  const std::vector<double> one = { 0.0 };
  CHECK_THROWS_AS(fit_transport_splines(one, std::vector<Matrix>(1, Matrix::Zero(1, 1))),
                  InvalidInput);
  const std::vector<double> flat = { 0.0, 0.0 };
  CHECK_THROWS_AS(fit_transport_splines(flat, std::vector<Matrix>(2, Matrix::Zero(1, 1))),
                  InvalidInput);
}
