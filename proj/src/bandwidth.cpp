#include "dppmm/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dppmm {

namespace {

// linear-interpolation quantile (type 7) of an unsorted copy
double
quantile(std::vector<double>& v, double p)
{
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo),
                   v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size())
    return a;
  const double b =
    *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                      v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

void
check_samples(std::span<const double> samples)
{
  if (samples.size() < 2)
    throw InvalidInput("bandwidth selection needs at least two samples");
  for (double s : samples)
    if (!std::isfinite(s))
      throw InvalidInput("bandwidth selection got a non-finite sample");
}

} // namespace

Bandwidth
bandwidth_scott(std::span<const double> samples, double fallback_span)
{
  check_samples(samples);
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples)
    ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  std::vector<double> copy(samples.begin(), samples.end());
  const double q1 = quantile(copy, 0.25);
  const double q3 = quantile(copy, 0.75);
  const double robust = (q3 - q1) / 1.349;

  double spread = robust > 0.0 ? std::min(sd, robust) : sd;
  if (!(spread > 0.0))
    return { 1e-3 * fallback_span, true };
  return { spread * std::pow(n, -0.2), false };
}

namespace {

// a_k = 2 sum_j x_j cos(pi k (2j + 1) / (2n)), k = 0..n-1
std::vector<double>
dct2(const std::vector<double>& x)
{
  const std::size_t n = x.size();
  const std::size_t period = 4 * n;
  std::vector<double> table(period);
  for (std::size_t m = 0; m < period; ++m)
    table[m] = std::cos(std::numbers::pi * static_cast<double>(m) /
                        (2.0 * static_cast<double>(n)));
  std::vector<double> a(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    std::size_t m = k; // k * (2j + 1) mod 4n, advanced by 2k
    const std::size_t step = (2 * k) % period;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j] * table[m];
      m += step;
      if (m >= period)
        m -= period;
    }
    a[k] = 2.0 * acc;
  }
  return a;
}

// t - xi * gamma^[5](t) for the Botev fixed-point equation
double
isj_fixed_point(double t,
                double n,
                const std::vector<double>& isq,
                const std::vector<double>& a2)
{
  constexpr int ell = 7;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  auto functional = [&](int s, double time) {
    double acc = 0.0;
    for (std::size_t i = 0; i < isq.size(); ++i) {
      double p = 1.0;
      for (int e = 0; e < s; ++e)
        p *= isq[i];
      acc += p * a2[i] * std::exp(-isq[i] * pi2 * time);
    }
    return 2.0 * std::pow(std::numbers::pi, 2 * s) * acc;
  };

  double f = functional(ell, t);
  if (!(f > 0.0))
    return -1.0;
  for (int s = ell - 1; s >= 2; --s) {
    double odd_prod = 1.0;
    for (int k = 1; k <= 2 * s - 1; k += 2)
      odd_prod *= k;
    const double k0 = odd_prod / std::sqrt(2.0 * std::numbers::pi);
    const double c = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
    const double time = std::pow(2.0 * c * k0 / (n * f), 2.0 / (3.0 + 2.0 * s));
    f = functional(s, time);
    if (!(f > 0.0))
      return -1.0;
  }
  return t - std::pow(2.0 * n * std::sqrt(std::numbers::pi) * f, -0.4);
}

} // namespace

Bandwidth
bandwidth_isj(std::span<const double> samples,
              std::size_t grid_size,
              double fallback_span)
{
  check_samples(samples);
  if (grid_size < 8 || (grid_size & (grid_size - 1)) != 0)
    throw InvalidInput("ISJ grid size must be a power of two >= 8");

  auto scott = [&] {
    auto b = bandwidth_scott(samples, fallback_span);
    b.fallback = true;
    return b;
  };
  if (samples.size() < 50)
    return scott();

  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double span0 = *mx - *mn;
  if (!(span0 > 0.0))
    return scott();
  const double lo = *mn - 0.1 * span0;
  const double range = 1.2 * span0;

  std::vector<double> hist(grid_size, 0.0);
  const double n = static_cast<double>(samples.size());
  for (double s : samples) {
    auto k = static_cast<std::size_t>((s - lo) / range *
                                      static_cast<double>(grid_size));
    hist[std::min(k, grid_size - 1)] += 1.0 / n;
  }

  const auto a = dct2(hist);
  std::vector<double> isq(grid_size - 1), a2(grid_size - 1);
  for (std::size_t k = 1; k < grid_size; ++k) {
    isq[k - 1] = static_cast<double>(k) * static_cast<double>(k);
    a2[k - 1] = 0.25 * a[k] * a[k];
  }

  double left = 0.0;
  double right = 0.1;
  double g_left = isj_fixed_point(left, n, isq, a2);
  const double g_right = isj_fixed_point(right, n, isq, a2);
  if (!(g_left < 0.0 && g_right > 0.0))
    return scott();

  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (left + right);
    const double g = isj_fixed_point(mid, n, isq, a2);
    if ((g < 0.0) == (g_left < 0.0)) {
      left = mid;
      g_left = g;
    } else {
      right = mid;
    }
    if (right - left <= 1e-8 * right) {
      converged = true;
      break;
    }
  }
  if (!converged)
    return scott();
  const double t_star = 0.5 * (left + right);
  return { std::sqrt(t_star) * range, false };
}

Bandwidth
select_bandwidth(std::span<const double> samples,
                 const KdeConfig& cfg,
                 double span)
{
  switch (cfg.rule) {
    case BandwidthRule::scott:
      return bandwidth_scott(samples, span);
    case BandwidthRule::isj:
      return bandwidth_isj(samples, cfg.isj_grid, span);
    case BandwidthRule::fixed:
      return { cfg.fixed_bandwidth, false };
  }
  throw InvalidInput("unknown bandwidth rule");
}

} // namespace dppmm
