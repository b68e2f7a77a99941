#include "dppmm/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dppmm {

void
KdeConfig::validate() const
{
  if (bins < 8)
    throw InvalidInput("KDE needs at least 8 cells (got " +
                       std::to_string(bins) + ")");
  if (!(margin > 0.0) || !std::isfinite(margin))
    throw InvalidInput("KDE margin must be positive");
  if (!(floor > 0.0) || !std::isfinite(floor))
    throw InvalidInput("KDE density floor must be positive");
  if (rule == BandwidthRule::fixed &&
      (!(fixed_bandwidth > 0.0) || !std::isfinite(fixed_bandwidth)))
    throw InvalidInput("fixed bandwidth must be positive");
  if (isj_grid < 8 || (isj_grid & (isj_grid - 1)) != 0)
    throw InvalidInput("ISJ grid size must be a power of two >= 8");
}

// ---------------------------------------------------------------------------
// sorted quantile map

namespace {

// slope of the first (or last) segment with positive length
double
boundary_slope(const std::vector<double>& x,
               const std::vector<double>& y,
               bool lower)
{
  const std::size_t n = x.size();
  if (lower) {
    for (std::size_t k = 1; k < n; ++k)
      if (x[k] > x[0])
        return std::max(0.0, (y[k] - y[0]) / (x[k] - x[0]));
  } else {
    for (std::size_t k = n - 1; k-- > 0;)
      if (x[k] < x[n - 1])
        return std::max(0.0, (y[n - 1] - y[k]) / (x[n - 1] - x[k]));
  }
  return 0.0;
}

void
check_finite(std::span<const double> v, const char* what)
{
  for (double s : v)
    if (!std::isfinite(s))
      throw InvalidInput(std::string(what) + " contains non-finite values");
}

} // namespace

double
SortedQuantileMap::operator()(double t) const
{
  const auto& x = knots_x;
  const auto& y = knots_y;
  if (t < x.front())
    return y.front() + boundary_slope(x, y, true) * (t - x.front());
  if (t >= x.back()) {
    if (t == x.back())
      return y.back();
    return y.back() + boundary_slope(x, y, false) * (t - x.back());
  }
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const auto k = static_cast<std::size_t>(it - x.begin());
  const double x0 = x[k - 1], x1 = x[k];
  const double w = (t - x0) / (x1 - x0);
  return y[k - 1] + w * (y[k] - y[k - 1]);
}

void
SortedQuantileMap::validate() const
{
  if (knots_x.size() < 2 || knots_x.size() != knots_y.size())
    throw InvalidInput("sorted map needs >= 2 knots of equal length");
  check_finite(knots_x, "sorted map knots_x");
  check_finite(knots_y, "sorted map knots_y");
  if (!std::is_sorted(knots_x.begin(), knots_x.end()) ||
      !std::is_sorted(knots_y.begin(), knots_y.end()))
    throw InvalidInput("sorted map knots must be nondecreasing");
}

SortedQuantileMap
fit_sorted_map(std::span<const double> x, std::span<const double> y)
{
  if (x.size() < 2 || y.size() < 2)
    throw InvalidInput("sorted map needs at least two samples per side");
  check_finite(x, "source samples");
  check_finite(y, "target samples");

  SortedQuantileMap map;
  map.knots_x.assign(x.begin(), x.end());
  std::sort(map.knots_x.begin(), map.knots_x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(ys.begin(), ys.end());

  if (x.size() == y.size()) {
    map.knots_y = std::move(ys);
    return map;
  }

  // target quantile function at the source plotting positions (i - 1/2)/N1;
  // order statistic j sits at (j - 1/2)/N2
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(ys.size());
  map.knots_y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n1;
    const double u = std::clamp(p * n2 - 0.5, 0.0, n2 - 1.0);
    const auto j = std::min(static_cast<std::size_t>(u), ys.size() - 2);
    const double w = u - static_cast<double>(j);
    map.knots_y[i] = ys[j] + w * (ys[j + 1] - ys[j]);
  }
  return map;
}

// ---------------------------------------------------------------------------
// regularised map

double
RegularizedMap::operator()(double t) const
{
  if (!(t >= lo && t <= hi))
    return t;
  const std::size_t B = z.size();
  const double dz = (hi - lo) / static_cast<double>(B);

  // f1: (lo, 0), (z_i, F_i), (hi, 1)
  double p;
  const double u = (t - lo) / dz - 0.5;
  if (u <= 0.0) {
    p = cdf_source[0] * std::max(0.0, (t - lo) / (0.5 * dz));
  } else if (u >= static_cast<double>(B - 1)) {
    const double w = std::min(1.0, (t - z[B - 1]) / (0.5 * dz));
    p = cdf_source[B - 1] + w * (1.0 - cdf_source[B - 1]);
  } else {
    const auto i = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(i);
    p = cdf_source[i] + w * (cdf_source[i + 1] - cdf_source[i]);
  }

  // f2: inverse through (0, lo), (G_i, z_i), (1, hi)
  const auto& g = cdf_target;
  if (p <= g[0])
    return lo + (p / g[0]) * (z[0] - lo);
  if (p >= g[B - 1]) {
    const double w = (p - g[B - 1]) / (1.0 - g[B - 1]);
    return z[B - 1] + std::min(1.0, w) * (hi - z[B - 1]);
  }
  const auto it = std::upper_bound(g.begin(), g.end(), p);
  const auto k = static_cast<std::size_t>(it - g.begin());
  const double w = (p - g[k - 1]) / (g[k] - g[k - 1]);
  return z[k - 1] + w * (z[k] - z[k - 1]);
}

void
RegularizedMap::validate() const
{
  const std::size_t B = z.size();
  if (B < 8 || cdf_source.size() != B || cdf_target.size() != B)
    throw InvalidInput("regularized map arrays must share a length >= 8");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidInput("regularized map domain must satisfy lo < hi");
  check_finite(z, "regularized map grid");
  check_finite(cdf_source, "regularized map source CDF");
  check_finite(cdf_target, "regularized map target CDF");

  const double dz = (hi - lo) / static_cast<double>(B);
  for (std::size_t i = 0; i < B; ++i) {
    const double expected = lo + (static_cast<double>(i) + 0.5) * dz;
    if (std::abs(z[i] - expected) > 1e-9 * (hi - lo))
      throw InvalidInput("regularized map grid is not the uniform cell-centre "
                         "grid of its domain");
  }
  for (const auto* cdf : { &cdf_source, &cdf_target }) {
    if ((*cdf)[0] < 0.0 || (*cdf)[B - 1] > 1.0 + 1e-9)
      throw InvalidInput("regularized map CDF leaves [0, 1]");
    for (std::size_t i = 1; i < B; ++i)
      if (!((*cdf)[i] > (*cdf)[i - 1]))
        throw InvalidInput("regularized map CDF is not strictly increasing");
  }
}

namespace {

// midpoint cumulative sum of the floored density: value at cell centre i is
// the mass of cells < i plus half of cell i
std::vector<double>
regularized_cdf(const Vector& density, double dz, double floor)
{
  const auto B = density.size();
  Vector f = density.array() + floor;
  f /= dz * f.sum();
  std::vector<double> cdf(static_cast<std::size_t>(B));
  double mass = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const double cell = dz * f(i);
    cdf[static_cast<std::size_t>(i)] = mass + 0.5 * cell;
    mass += cell;
  }
  return cdf;
}

} // namespace

RegularizedMap
fit_regularized_map(std::span<const double> x,
                    std::span<const double> y,
                    const KdeConfig& cfg)
{
  cfg.validate();
  if (x.size() < 2 || y.size() < 2)
    throw InvalidInput("regularized map needs at least two samples per side");
  check_finite(x, "source samples");
  check_finite(y, "target samples");

  const auto [xmn, xmx] = std::minmax_element(x.begin(), x.end());
  const auto [ymn, ymx] = std::minmax_element(y.begin(), y.end());
  RegularizedMap map;
  map.lo = std::min(*xmn, *ymn) - cfg.margin;
  map.hi = std::max(*xmx, *ymx) + cfg.margin;

  const auto B = static_cast<Eigen::Index>(cfg.bins);
  const double dz = (map.hi - map.lo) / static_cast<double>(B);
  Vector z(B);
  for (Eigen::Index i = 0; i < B; ++i)
    z(i) = map.lo + (static_cast<double>(i) + 0.5) * dz;

  // samples within half a cell of the domain edge are binned into the end
  // cells
  auto clamped = [&](std::span<const double> v) {
    std::vector<double> c(v.begin(), v.end());
    for (auto& s : c)
      s = std::clamp(s, z(0), z(B - 1));
    return c;
  };
  const auto xc = clamped(x);
  const auto yc = clamped(y);

  const double span = map.hi - map.lo;
  const double hx = select_bandwidth(x, cfg, span).h;
  const double hy = select_bandwidth(y, cfg, span).h;
  const Vector fx = fft_kde(xc, hx, z);
  const Vector fy = fft_kde(yc, hy, z);

  map.z.assign(z.data(), z.data() + B);
  map.cdf_source = regularized_cdf(fx, dz, cfg.floor);
  map.cdf_target = regularized_cdf(fy, dz, cfg.floor);
  return map;
}

// ---------------------------------------------------------------------------

double
evaluate(const Map1D& map, double t)
{
  return std::visit([t](const auto& m) { return m(t); }, map);
}

void
evaluate(const Map1D& map, std::span<double> values)
{
  std::visit(
    [values](const auto& m) {
      for (auto& v : values)
        v = m(v);
    },
    map);
}

void
validate_map(const Map1D& map)
{
  std::visit([](const auto& m) { m.validate(); }, map);
}

} // namespace dppmm
