#include "dppmm/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>

using namespace dppmm;

namespace {

// Population MMD^2 between N(0, I_d) and N(m, I_d) with |m| = delta for the kernel
// exp(-|x-y|^2 / (2 s^2)).
double
gaussian_mmd2(Eigen::Index d, double delta, double s)
{
  const double c = std::pow(s * s / (s * s + 2.0), 0.5 * static_cast<double>(d));
  return 2.0 * c - 2.0 * c * std::exp(-delta * delta / (2.0 * (s * s + 2.0)));
}

Matrix
permute_rows(const Matrix& m, std::uint64_t seed)
{
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    out.row(i) = m.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

} // namespace

TEST_CASE("hand cases")
{
  const Matrix zeros = Matrix::Zero(4, 1);
  CHECK(std::abs(mmd2(zeros, zeros, 1.0)) <= 1e-12);
  CHECK(std::abs(linear_mmd2(zeros, zeros, 1.0).value) <= 1e-12);

  for (double a : { 0.5, 1.0, 3.0 })
    for (double s : { 0.3, 1.0, 2.0 }) {
      const Matrix far = Matrix::Constant(4, 1, a);
      const double expected = 2.0 - 2.0 * std::exp(-a * a / (2.0 * s * s));
      CHECK(std::abs(mmd2(zeros, far, s) - expected) <= 1e-12);
      CHECK(std::abs(linear_mmd2(zeros, far, s).value - expected) <= 1e-12);
    }

  Vector u(2), v(2);
  u << 0, 0;
  v << 3, 4;
  CHECK(gaussian_kernel(u, v, 5.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("quadratic estimator matches the naive double loop")
{
  const Matrix x = oracle::normal_matrix(60, 3, 1);
  const Matrix y = oracle::normal_matrix(45, 3, 2, 0.4, 1.2);
  const auto grid = BandwidthGrid::standard();
  const auto all = mmd2_all(x, y, grid.values());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = grid.values()[k];
    const double ref = oracle::naive_mmd2(x, y, s);
    CHECK(std::abs(mmd2(x, y, s) - ref) <= 1e-12);
    CHECK(std::abs(all[k] - ref) <= 1e-12);
    CHECK(std::abs(mmd2(y, x, s) - mmd2(x, y, s)) <= 1e-12);
  }
  // far apart points underflow the kernel; the bank must agree with naive
  const Matrix far = oracle::normal_matrix(30, 2, 3, 50.0);
  CHECK(std::abs(mmd2(x.leftCols(2), far, 0.01) -
                 oracle::naive_mmd2(x.leftCols(2), far, 0.01)) <= 1e-12);
}

TEST_CASE("identical inputs")
{
  // The quadratic cross term includes the i = j pairs, so X = Y gives
  // 2 S / (N^2 (N - 1)) - 2 / N with S the off-diagonal kernel sum: never
  // positive, and zero only when every kernel value is one.
  const Eigen::Index n = 100;
  const Matrix x = oracle::normal_matrix(n, 2, 4);
  const auto grid = BandwidthGrid::standard();
  for (double s : grid.values()) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j)
          off += std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (2.0 * s * s));
    const double nn = static_cast<double>(n);
    const double closed = 2.0 * off / (nn * nn * (nn - 1.0)) - 2.0 / nn;
    CHECK(std::abs(mmd2(x, x, s) - closed) <= 1e-12);
    CHECK(mmd2(x, x, s) <= 1e-15);
    CHECK(linear_mmd2(x, x, s).value == 0.0);
  }
  const double g = gmmd2(x, x, grid, MmdEstimator::quadratic).value;
  CHECK(g <= 1e-15);
  CHECK(g >= -2.0 / static_cast<double>(n));

  const Matrix two = Matrix::Zero(2, 1);
  CHECK(std::abs(mmd2(two, two, 0.7)) <= 1e-12);
}

TEST_CASE("default grid")
{
  const auto g = BandwidthGrid::standard();
  REQUIRE(g.size() == 15);
  CHECK(g.values().front() == doctest::Approx(1e-2));
  CHECK(g.values().back() == doctest::Approx(1e2));
  for (std::size_t k = 1; k < g.size(); ++k)
    CHECK(g.values()[k] / g.values()[k - 1] ==
          doctest::Approx(std::pow(1e4, 1.0 / 14.0)));
  CHECK_THROWS_AS(BandwidthGrid({ 1.0, 1.0 }), InvalidInput);
  CHECK_THROWS_AS(BandwidthGrid({ -1.0, 1.0 }), InvalidInput);
  CHECK_THROWS_AS(BandwidthGrid({}), InvalidInput);
}

TEST_CASE("GMMD is the grid maximum")
{
  const Matrix x = oracle::normal_matrix(200, 2, 5);
  const Matrix y = oracle::normal_matrix(200, 2, 6, 0.5);
  const auto grid = BandwidthGrid::standard();

  const auto q = gmmd2(x, y, grid, MmdEstimator::quadratic);
  double best = -INFINITY, arg = 0.0;
  for (double s : grid.values())
    if (const double v = mmd2(x, y, s); v > best) {
      best = v;
      arg = s;
    }
  CHECK(std::abs(q.value - best) <= 1e-12);
  CHECK(q.sigma == arg);
  CHECK(q.estimator == MmdEstimator::quadratic);

  const auto l = gmmd2(x, y, grid, MmdEstimator::linear);
  best = -INFINITY;
  for (double s : grid.values())
    best = std::max(best, linear_mmd2(x, y, s).value);
  CHECK(std::abs(l.value - best) <= 1e-12);
  CHECK(l.estimator == MmdEstimator::linear);

  CHECK(gmmd2(x, y, grid).estimator == MmdEstimator::quadratic);
  CHECK(resolve_estimator(MmdEstimator::automatic, 2001, 2001) == MmdEstimator::linear);
  CHECK(resolve_estimator(MmdEstimator::automatic, 2000, 5000) == MmdEstimator::quadratic);
  CHECK(mmd_estimator_from_string("auto") == MmdEstimator::automatic);
  CHECK_THROWS_AS(mmd_estimator_from_string("cubic"), InvalidInput);
}

TEST_CASE("snapshot averages")
{
  const auto grid = BandwidthGrid::standard();
  const Matrix x = oracle::normal_matrix(300, 2, 7);
  const Matrix y = oracle::normal_matrix(300, 2, 8, 0.3);
  const std::vector<Snapshot> a1 = { Snapshot(0.5, x) }, b1 = { Snapshot(0.5, y) };
  const auto one = avg_gmmd2(a1, b1, grid, MmdEstimator::quadratic);
  CHECK(one.average == gmmd2(x, y, grid, MmdEstimator::quadratic).value);

  const std::vector<Snapshot> a = { Snapshot(0.0, x), Snapshot(1.0, y) };
  const std::vector<Snapshot> b = { Snapshot(0.0, y), Snapshot(1.0, y) };
  const auto two = avg_gmmd2(a, b, grid, MmdEstimator::quadratic);
  CHECK(two.average == doctest::Approx(0.5 * (one.average + two.per_snapshot[1].value)));
  CHECK(two.per_snapshot[1].value <= 0.0);

  const std::vector<Snapshot> ap = { Snapshot(0.0, permute_rows(x, 1)),
                                     Snapshot(1.0, permute_rows(y, 2)) };
  const auto permuted = avg_gmmd2(ap, b, grid, MmdEstimator::quadratic);
  CHECK(std::abs(permuted.average - two.average) <= 1e-12);

  const auto threaded = avg_gmmd2(a, b, grid, MmdEstimator::quadratic, 3);
  CHECK(threaded.average == two.average);

  const std::vector<Snapshot> shifted = { Snapshot(0.0, y), Snapshot(1.0 + 1e-6, y) };
  CHECK_THROWS_AS(avg_gmmd2(a, shifted, grid), InvalidInput);
  CHECK_THROWS_AS(avg_gmmd2(a, b1, grid), InvalidInput);
}

TEST_CASE("linear estimator edge cases")
{
  const Matrix x = oracle::normal_matrix(7, 2, 9);
  const Matrix y = oracle::normal_matrix(7, 2, 10);
  const auto odd = linear_mmd2(x, y, 1.0);
  CHECK(odd.dropped_last);
  CHECK(odd.value == linear_mmd2(x.topRows(6), y.topRows(6), 1.0).value);
  CHECK_FALSE(linear_mmd2(x.topRows(6), y.topRows(6), 1.0).dropped_last);
  CHECK_THROWS_AS(linear_mmd2(x, y.topRows(6), 1.0), InvalidInput);
  CHECK_THROWS_AS(linear_mmd2(x.topRows(3), y.topRows(3), 1.0), InvalidInput);
  CHECK_THROWS_AS(mmd2(x.topRows(1), y, 1.0), InvalidInput);
  CHECK_THROWS_AS(mmd2(x, Matrix::Zero(7, 3), 1.0), InvalidInput);
}

TEST_CASE("same distribution: small magnitudes; shifted: clear signal")
{
  const Eigen::Index N = 1000;
  std::vector<double> same, shifted;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const Matrix x = oracle::normal_matrix(N, 2, 1000 + r);
    const Matrix y = oracle::normal_matrix(N, 2, 5000 + r);
    same.push_back(std::abs(mmd2(x, y, 1.0)));
    if (r < 10) {
      const Matrix z = oracle::normal_matrix(N, 2, 9000 + r, 0.5);
      shifted.push_back(mmd2(x, z, 1.0));
    }
    CHECK(mmd2(x, y, 1.0) >= -0.1);
  }
  const double med = oracle::median(same);
  CHECK(med < 5.0 / static_cast<double>(N));
  CHECK(oracle::median(shifted) >= 10.0 * med);
}

TEST_CASE("linear and quadratic estimators share the population value")
{
  const double delta = 0.5, s = 1.0;
  // every coordinate of y is shifted by delta
  const double truth = gaussian_mmd2(2, std::sqrt(2.0) * delta, s);
  std::vector<double> lin, quad;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const Matrix x = oracle::normal_matrix(2000, 2, 20000 + r);
    const Matrix y = oracle::normal_matrix(2000, 2, 40000 + r, delta);
    lin.push_back(linear_mmd2(x, y, s).value);
    if (r < 20)
      quad.push_back(mmd2(x, y, s));
  }
  CHECK(std::abs(oracle::mean(lin) - truth) <= 3.0 * oracle::std_error(lin));
  CHECK(std::abs(oracle::mean(quad) - truth) <= 3.0 * oracle::std_error(quad));
  const double se = std::hypot(oracle::std_error(lin), oracle::std_error(quad));
  CHECK(std::abs(oracle::mean(lin) - oracle::mean(quad)) <= 3.0 * se);
}
