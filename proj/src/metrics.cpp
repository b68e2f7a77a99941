#include "dppmm/metrics.hpp"
#include "dppmm/snapshot_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dppmm {

BandwidthGrid::BandwidthGrid(std::vector<double> values)
  : values_(std::move(values))
{
  if (values_.empty())
    throw InvalidInput("bandwidth grid is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] > 0.0) || !std::isfinite(values_[k]))
      throw InvalidInput("bandwidths must be positive and finite");
    if (k > 0 && !(values_[k] > values_[k - 1]))
      throw InvalidInput("bandwidth grid must be strictly increasing");
  }
}

BandwidthGrid
BandwidthGrid::log_spaced(double lo, double hi, std::size_t count)
{
  if (!(lo > 0.0) || !(hi > lo) || count < 1)
    throw InvalidInput("log-spaced grid needs 0 < lo < hi and count >= 1");
  if (count == 1)
    return BandwidthGrid({ lo });
  std::vector<double> v(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t k = 0; k < count; ++k)
    v[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) /
                                static_cast<double>(count - 1));
  v.front() = lo;
  v.back() = hi;
  return BandwidthGrid(std::move(v));
}

BandwidthGrid
BandwidthGrid::standard()
{
  return log_spaced(1e-2, 1e2, 15);
}

std::string_view
to_string(MmdEstimator e)
{
  switch (e) {
    case MmdEstimator::quadratic:
      return "quadratic";
    case MmdEstimator::linear:
      return "linear";
    case MmdEstimator::automatic:
      return "auto";
  }
  return "unknown";
}

MmdEstimator
mmd_estimator_from_string(std::string_view s)
{
  if (s == "quadratic")
    return MmdEstimator::quadratic;
  if (s == "linear")
    return MmdEstimator::linear;
  if (s == "auto")
    return MmdEstimator::automatic;
  throw InvalidInput("unknown estimator '" + std::string(s) +
                     "' (expected quadratic, linear or auto)");
}

MmdEstimator
resolve_estimator(MmdEstimator e, Eigen::Index n1, Eigen::Index n2)
{
  if (e != MmdEstimator::automatic)
    return e;
  return std::min(n1, n2) <= 2000 ? MmdEstimator::quadratic
                                  : MmdEstimator::linear;
}

double
gaussian_kernel(const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& y,
                double sigma)
{
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

namespace {

void
check_sigmas(std::span<const double> sigmas)
{
  if (sigmas.empty())
    throw InvalidInput("no kernel bandwidths given");
  for (double s : sigmas)
    if (!(s > 0.0) || !std::isfinite(s))
      throw InvalidInput("kernel bandwidth must be positive");
}

// Coefficients c_k = 1 / (2 sigma_k^2), visited from the widest kernel
// down so that the loop can stop once exp underflows to zero.
struct KernelBank
{
  std::vector<double> coef;   // descending sigma order
  std::vector<std::size_t> slot;

  explicit KernelBank(std::span<const double> sigmas)
  {
    std::vector<std::size_t> order(sigmas.size());
    for (std::size_t k = 0; k < order.size(); ++k)
      order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return sigmas[a] > sigmas[b];
    });
    for (auto k : order) {
      coef.push_back(1.0 / (2.0 * sigmas[k] * sigmas[k]));
      slot.push_back(k);
    }
  }

  // acc[slot] += exp(-r * coef)
  void add(double r, double* acc) const
  {
    for (std::size_t k = 0; k < coef.size(); ++k) {
      const double a = r * coef[k];
      if (a > 745.2)
        break;
      acc[slot[k]] += std::exp(-a);
    }
  }
};

// sum over i of sum over j (j > i when `upper`) of k(a_i, b_j), per sigma.
// a and b are d x N (column per sample).
std::vector<double>
kernel_sums(const Matrix& a, const Matrix& b, bool upper,
            const KernelBank& bank, unsigned threads)
{
  const auto na = a.cols();
  const auto nb = b.cols();
  const std::size_t S = bank.coef.size();
  std::vector<double> rows(static_cast<std::size_t>(na) * S, 0.0);

  parallel_for(static_cast<std::size_t>(na), threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i) {
                   double* acc = rows.data() + i * S;
                   const auto ii = static_cast<Eigen::Index>(i);
                   for (Eigen::Index j = upper ? ii + 1 : 0; j < nb; ++j) {
                     const double r = (a.col(ii) - b.col(j)).squaredNorm();
                     bank.add(r, acc);
                   }
                 }
               });

  std::vector<double> total(S), column(static_cast<std::size_t>(na));
  for (std::size_t k = 0; k < S; ++k) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(na); ++i)
      column[i] = rows[i * S + k];
    total[k] = pairwise_sum(column);
  }
  return total;
}

void
check_pair(const Matrix& x, const Matrix& y, Eigen::Index min_rows)
{
  if (x.cols() != y.cols())
    throw InvalidInput("MMD inputs have different dimensions (" +
                       std::to_string(x.cols()) + " vs " +
                       std::to_string(y.cols()) + ")");
  if (x.rows() < min_rows || y.rows() < min_rows)
    throw InvalidInput("MMD needs at least " + std::to_string(min_rows) +
                       " samples per set");
  if (!x.allFinite() || !y.allFinite())
    throw InvalidInput("MMD inputs contain non-finite values");
}

std::vector<double>
mmd2_all_threads(const Matrix& x, const Matrix& y,
                 std::span<const double> sigmas, unsigned threads)
{
  check_pair(x, y, 2);
  check_sigmas(sigmas);
  const KernelBank bank(sigmas);
  const Matrix xt = x.transpose();
  const Matrix yt = y.transpose();
  const auto sxx = kernel_sums(xt, xt, true, bank, threads);
  const auto syy = kernel_sums(yt, yt, true, bank, threads);
  const auto sxy = kernel_sums(xt, yt, false, bank, threads);

  const double n1 = static_cast<double>(x.rows());
  const double n2 = static_cast<double>(y.rows());
  std::vector<double> out(sigmas.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = 2.0 * sxx[k] / (n1 * (n1 - 1.0)) +
             2.0 * syy[k] / (n2 * (n2 - 1.0)) - 2.0 * sxy[k] / (n1 * n2);
  return out;
}

std::vector<double>
linear_all(const Matrix& x, const Matrix& y, std::span<const double> sigmas,
           bool* dropped)
{
  if (x.rows() != y.rows())
    throw InvalidInput("linear MMD needs equal sample sizes (got " +
                       std::to_string(x.rows()) + " and " +
                       std::to_string(y.rows()) + ")");
  check_pair(x, y, 4);
  check_sigmas(sigmas);
  const KernelBank bank(sigmas);
  const Matrix xt = x.transpose();
  const Matrix yt = y.transpose();
  const auto pairs = x.rows() / 2;
  if (dropped)
    *dropped = x.rows() % 2 != 0;

  const std::size_t S = sigmas.size();
  std::vector<double> h(static_cast<std::size_t>(pairs) * S, 0.0);
  std::vector<double> pos(S), neg(S);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    const auto a = 2 * i, b = 2 * i + 1;
    std::fill(pos.begin(), pos.end(), 0.0);
    std::fill(neg.begin(), neg.end(), 0.0);
    bank.add((xt.col(a) - xt.col(b)).squaredNorm(), pos.data());
    bank.add((yt.col(a) - yt.col(b)).squaredNorm(), pos.data());
    bank.add((xt.col(a) - yt.col(b)).squaredNorm(), neg.data());
    bank.add((xt.col(b) - yt.col(a)).squaredNorm(), neg.data());
    for (std::size_t k = 0; k < S; ++k)
      h[k * static_cast<std::size_t>(pairs) + static_cast<std::size_t>(i)] =
        pos[k] - neg[k];
  }
  std::vector<double> out(S);
  for (std::size_t k = 0; k < S; ++k)
    out[k] = pairwise_sum(std::span<const double>(
               h.data() + k * static_cast<std::size_t>(pairs),
               static_cast<std::size_t>(pairs))) /
             static_cast<double>(pairs);
  return out;
}

} // namespace

std::vector<double>
mmd2_all(const Matrix& x, const Matrix& y, std::span<const double> sigmas)
{
  return mmd2_all_threads(x, y, sigmas, 1);
}

double
mmd2(const Matrix& x, const Matrix& y, double sigma)
{
  const double s[1] = { sigma };
  return mmd2_all(x, y, s)[0];
}

LinearMmd
linear_mmd2(const Matrix& x, const Matrix& y, double sigma)
{
  const double s[1] = { sigma };
  LinearMmd out;
  out.value = linear_all(x, y, s, &out.dropped_last)[0];
  return out;
}

std::vector<double>
linear_mmd2_all(const Matrix& x, const Matrix& y, std::span<const double> sigmas)
{
  return linear_all(x, y, sigmas, nullptr);
}

namespace {

GmmdResult
gmmd2_threads(const Matrix& x, const Matrix& y, const BandwidthGrid& grid,
              MmdEstimator estimator, unsigned threads)
{
  GmmdResult out;
  out.estimator = resolve_estimator(estimator, x.rows(), y.rows());
  const auto values =
    out.estimator == MmdEstimator::linear
      ? linear_all(x, y, grid.values(), nullptr)
      : mmd2_all_threads(x, y, grid.values(), threads);
  const auto best = std::max_element(values.begin(), values.end());
  out.value = *best;
  out.sigma = grid.values()[static_cast<std::size_t>(best - values.begin())];
  return out;
}

} // namespace

GmmdResult
gmmd2(const Matrix& x, const Matrix& y, const BandwidthGrid& grid,
      MmdEstimator estimator)
{
  return gmmd2_threads(x, y, grid, estimator, 1);
}

SeriesGmmd
avg_gmmd2(std::span<const Snapshot> a,
          std::span<const Snapshot> b,
          const BandwidthGrid& grid,
          MmdEstimator estimator,
          unsigned threads)
{
  if (a.empty() || a.size() != b.size())
    throw InvalidInput("series to compare need the same positive number of "
                       "snapshots (got " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()) + ")");
  SeriesGmmd out;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j].time() - b[j].time()) > 1e-9)
      throw InvalidInput("snapshot " + std::to_string(j) + " times differ: " +
                         format_double(a[j].time()) + " vs " +
                         format_double(b[j].time()));
    out.times.push_back(a[j].time());
  }
  const unsigned t = threads == 0 ? default_thread_count() : threads;
  for (std::size_t j = 0; j < a.size(); ++j)
    out.per_snapshot.push_back(
      gmmd2_threads(a[j].samples(), b[j].samples(), grid, estimator, t));
  std::vector<double> v;
  for (const auto& r : out.per_snapshot)
    v.push_back(r.value);
  out.average = pairwise_sum(v) / static_cast<double>(v.size());
  return out;
}

SeriesGmmd
avg_gmmd2(const SnapshotSeries& a,
          const SnapshotSeries& b,
          const BandwidthGrid& grid,
          MmdEstimator estimator,
          unsigned threads)
{
  return avg_gmmd2(std::span<const Snapshot>(a.snapshots()),
                   std::span<const Snapshot>(b.snapshots()), grid, estimator,
                   threads);
}

} // namespace dppmm
