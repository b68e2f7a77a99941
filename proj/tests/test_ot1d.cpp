#include "dppmm/ot1d.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>

using namespace dppmm;

namespace {

std::vector<double>
push(const Map1D& m, std::vector<double> v)
{
  evaluate(m, std::span<double>(v));
  return v;
}

double
sorted_cost(std::vector<double> x, std::vector<double> y)
{
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    c += (x[i] - y[i]) * (x[i] - y[i]);
  return c;
}

KdeConfig
kde(std::size_t bins, double margin)
{
  KdeConfig c;
  c.bins = bins;
  c.margin = margin;
  return c;
}

} // namespace

TEST_CASE("sorted map on identical samples is the identity")
{
  const std::vector<double> x = { 1, 2, 3 };
  const auto m = fit_sorted_map(x, x);
  for (double t : { 1.0, 1.3, 2.0, 2.9, 3.0 })
    CHECK(m(t) == doctest::Approx(t));
}

TEST_CASE("sorted map pairs order statistics")
{
  const std::vector<double> x = { 3, 1, 2 }, y = { 10, 30, 20 };
  const auto m = fit_sorted_map(x, y);
  CHECK(m(1.0) == 10.0);
  CHECK(m(2.0) == 20.0);
  CHECK(m(3.0) == 30.0);
  CHECK(m(1.5) == 15.0);
  // linear extension with the boundary slopes
  CHECK(m(0.0) == doctest::Approx(0.0));
  CHECK(m(4.0) == doctest::Approx(40.0));
}

TEST_CASE("sorted map recovers the Gaussian transport map")
{
  // A single draw of 10^4 samples carries about 0.04 standard deviation at
  // t = +-1, so the check runs over replicates: the median error stays
  // below 0.05 and the replicate mean is unbiased within 3 SE.
  for (double q : { -1.0, 0.0, 1.0 }) {
    std::vector<double> err, abs_err;
    for (std::uint64_t r = 0; r < 40; ++r) {
      const auto x = oracle::normal_vector(10000, 1000 + r);
      const auto y = oracle::normal_vector(10000, 2000 + r, 1.0, 2.0);
      const double e = fit_sorted_map(x, y)(q) - (1.0 + 2.0 * q);
      err.push_back(e);
      abs_err.push_back(std::abs(e));
    }
    CHECK(oracle::median(abs_err) <= 0.05);
    CHECK(std::abs(oracle::mean(err)) <= 3.0 * oracle::std_error(err));
  }
}

TEST_CASE("sorted map with unequal sizes uses midpoint plotting positions")
{
  const std::vector<double> x = { 0.0, 1.0 };
  const std::vector<double> y = { 0.0, 1.0, 2.0, 3.0 };
  const auto m = fit_sorted_map(x, y);
  // source positions 1/4 and 3/4; target order statistic j sits at (j+1/2)/4
  REQUIRE(m.knots_y.size() == 2);
  CHECK(m.knots_y[0] == doctest::Approx(0.5));
  CHECK(m.knots_y[1] == doctest::Approx(2.5));

  const auto big = oracle::normal_vector(20000, 3);
  const auto small = oracle::normal_vector(7000, 4, 2.0, 0.5);
  const auto mu = fit_sorted_map(big, small);
  CHECK(oracle::ks_distance(push(mu, big), small) <= 0.02);
}

TEST_CASE("sorted map boundary slope is clamped at zero for flat ends")
{
  const std::vector<double> x = { 0, 1, 2 }, y = { 5, 5, 6 };
  const auto m = fit_sorted_map(x, y);
  CHECK(m(-3.0) == 5.0);
  CHECK(m(3.0) == doctest::Approx(7.0));
}

TEST_CASE("sorted pairing beats random permutations")
{
  const auto x = oracle::normal_vector(500, 5);
  const auto y = oracle::normal_vector(500, 6, 0.5, 2.0);
  const double best = sorted_cost(x, y);
  std::vector<double> ys = y;
  std::sort(ys.begin(), ys.end());
  std::vector<double> xs = x;
  std::sort(xs.begin(), xs.end());
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    std::shuffle(ys.begin(), ys.end(), rng);
    double c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      c += (xs[i] - ys[i]) * (xs[i] - ys[i]);
    CHECK(best <= c);
  }
}

TEST_CASE("regularised map of a sample onto itself is near the identity")
{
  const auto x = oracle::normal_vector(3000, 8);
  const auto cfg = kde(500, 0.1);
  const auto m = fit_regularized_map(x, x, cfg);
  const double dz = (m.hi - m.lo) / static_cast<double>(cfg.bins);
  for (double zi : m.z)
    CHECK(std::abs(m(zi) - zi) <= 2.0 * dz);
}

TEST_CASE("regularised map is the identity outside its domain")
{
  const auto x = oracle::normal_vector(1000, 9);
  const auto y = oracle::normal_vector(1000, 10, 0.5, 0.5);
  const auto m = fit_regularized_map(x, y, kde(200, 0.1));
  for (double t : { m.lo - 1e-9, m.hi + 1e-9, -100.0, 100.0 })
    CHECK(m(t) == t);
  CHECK(m(m.lo) == doctest::Approx(m.lo));
  CHECK(m(m.hi) == doctest::Approx(m.hi));
}

TEST_CASE("regularised map recovers the Gaussian transport map")
{
  const auto x = oracle::normal_vector(10000, 11, 0.0, 0.2);
  const auto y = oracle::normal_vector(10000, 12, 0.3, 0.3);
  const auto m = fit_regularized_map(x, y, kde(2000, 0.25));
  CHECK(std::abs(m(0.0) - 0.3) <= 0.02);
}

TEST_CASE("property: monotone maps, valid CDFs, pushforward close in KS")
{
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    const auto x = oracle::normal_vector(10000, seed, 0.0, 1.0);
    const auto y = oracle::concat(oracle::normal_vector(5000, seed + 100, -1.0, 0.5),
                                  oracle::normal_vector(5000, seed + 200, 1.5, 0.7));

    const auto sm = fit_sorted_map(x, y);
    auto cfg = kde(500, 0.1);
    if (seed % 2)
      cfg.rule = BandwidthRule::isj;
    const auto rm = fit_regularized_map(x, y, cfg);

    CHECK(oracle::ks_distance(push(sm, x), y) <= 0.02);
    CHECK(oracle::ks_distance(push(rm, x), y) <= 0.05);

    double prev_s = -INFINITY, prev_r = -INFINITY;
    for (double t = rm.lo - 0.5; t <= rm.hi + 0.5; t += 1e-3) {
      const double s = sm(t);
      CHECK(s >= prev_s);
      prev_s = s;
      if (t > rm.lo && t < rm.hi) {
        const double r = rm(t);
        CHECK(r > prev_r);
        prev_r = r;
      }
    }

    const double dz = (rm.hi - rm.lo) / static_cast<double>(cfg.bins);
    const double bound = cfg.floor * dz / (1.0 + cfg.floor * (rm.hi - rm.lo));
    for (const auto* cdf : { &rm.cdf_source, &rm.cdf_target }) {
      CHECK(cdf->front() >= 0.0);
      CHECK(cdf->back() <= 1.0 + 1e-9);
      for (std::size_t i = 1; i < cdf->size(); ++i)
        CHECK((*cdf)[i] - (*cdf)[i - 1] >= bound * (1.0 - 1e-9));
    }
    CHECK_NOTHROW(validate_map(rm));
    CHECK_NOTHROW(validate_map(sm));
  }
}

TEST_CASE("far-out samples land in the domain edges without error")
{
  std::vector<double> x = oracle::normal_vector(500, 30);
  x.push_back(40.0);
  const auto y = oracle::normal_vector(500, 31, 1.0);
  const auto m = fit_regularized_map(x, y, kde(100, 0.1));
  CHECK(m(40.0) <= m.hi);
  CHECK(std::isfinite(m(0.0)));
}

TEST_CASE("configuration and map validation errors")
{
  const std::vector<double> x = { 0.0, 1.0, 2.0 };
  CHECK_THROWS_AS(fit_sorted_map(std::vector<double>{ 1.0 }, x), InvalidInput);
  CHECK_THROWS_AS(fit_regularized_map(x, x, kde(4, 0.1)), InvalidInput);
  CHECK_THROWS_AS(fit_regularized_map(x, x, kde(64, 0.0)), InvalidInput);
  auto bad = kde(64, 0.1);
  bad.rule = BandwidthRule::fixed;
  CHECK_THROWS_AS(fit_regularized_map(x, x, bad), InvalidInput);

  auto m = fit_regularized_map(x, x, kde(64, 0.1));
  m.cdf_target[10] = m.cdf_target[9];
  CHECK_THROWS_AS(m.validate(), InvalidInput);
  SortedQuantileMap s{ { 0.0, 1.0 }, { 1.0, 0.0 } };
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}
