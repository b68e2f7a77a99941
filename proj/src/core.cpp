#include "dppmm/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace dppmm {

Snapshot::Snapshot(double time, Matrix samples)
  : time_(time)
  , samples_(std::move(samples))
{
  if (samples_.rows() < 1 || samples_.cols() < 1)
    throw InvalidInput("snapshot needs at least one sample and one dimension");
  if (!std::isfinite(time_))
    throw InvalidInput("snapshot time must be finite");
  if (!samples_.allFinite())
    throw InvalidInput("snapshot at time " + std::to_string(time_) +
                       " contains non-finite entries");
}

SnapshotSeries::SnapshotSeries(std::vector<Snapshot> snapshots)
  : snapshots_(std::move(snapshots))
{
  if (snapshots_.empty())
    throw InvalidInput("snapshot series is empty");
  const auto d = snapshots_.front().dim();
  for (std::size_t j = 0; j < snapshots_.size(); ++j) {
    if (snapshots_[j].dim() != d)
      throw InvalidInput("snapshot " + std::to_string(j) +
                         " has a different dimension");
    if (j > 0 && !(snapshots_[j].time() > snapshots_[j - 1].time()))
      throw InvalidInput("snapshot times must be strictly increasing");
  }
}

std::vector<double>
SnapshotSeries::times() const
{
  std::vector<double> t;
  t.reserve(snapshots_.size());
  for (const auto& s : snapshots_)
    t.push_back(s.time());
  return t;
}

SnapshotSeries
SnapshotSeries::select(std::span<const std::size_t> indices) const
{
  std::vector<Snapshot> out;
  for (auto j : indices) {
    if (j >= snapshots_.size())
      throw InvalidInput("snapshot index " + std::to_string(j) +
                         " out of range");
    out.push_back(snapshots_[j]);
  }
  return SnapshotSeries(std::move(out));
}

AffineRescaler
AffineRescaler::identity(Eigen::Index d)
{
  return { Vector::Zero(d), Vector::Ones(d), 0.0, 1.0 };
}

void
AffineRescaler::validate() const
{
  if (shift.size() < 1 || shift.size() != scale.size())
    throw InvalidInput("rescaler shift/scale sizes disagree");
  if (!shift.allFinite() || !scale.allFinite())
    throw InvalidInput("rescaler has non-finite entries");
  if ((scale.array() <= 0.0).any())
    throw InvalidInput("rescaler scale must be positive");
  if (!std::isfinite(time_origin) || !(time_span > 0.0) ||
      !std::isfinite(time_span))
    throw InvalidInput("rescaler time span must be positive and finite");
}

AffineRescaler
fit_rescaler(const SnapshotSeries& series)
{
  const auto d = series.dim();
  Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const auto& s : series.snapshots()) {
    lo = lo.cwiseMin(s.samples().colwise().minCoeff().transpose());
    hi = hi.cwiseMax(s.samples().colwise().maxCoeff().transpose());
  }

  AffineRescaler r;
  r.shift.resize(d);
  r.scale.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (hi(k) > lo(k)) {
      r.shift(k) = 0.5 * (lo(k) + hi(k));
      r.scale(k) = 2.0 / (hi(k) - lo(k));
    } else {
      // degenerate range: unit scale, centred at 0
      r.shift(k) = lo(k);
      r.scale(k) = 1.0;
    }
  }

  const double t0 = series[0].time();
  const double t1 = series[series.size() - 1].time();
  r.time_origin = t0;
  r.time_span = t1 > t0 ? t1 - t0 : 1.0;
  return r;
}

namespace {

void
check_dim(const AffineRescaler& r, const Matrix& samples)
{
  if (samples.cols() != r.dim())
    throw InvalidInput("rescaler dimension " + std::to_string(r.dim()) +
                       " does not match " + std::to_string(samples.cols()) +
                       " columns");
}

} // namespace

Matrix
apply_rescaler(const AffineRescaler& r, const Matrix& samples)
{
  check_dim(r, samples);
  return ((samples.rowwise() - r.shift.transpose()).array().rowwise() *
          r.scale.transpose().array())
    .matrix();
}

Matrix
invert_rescaler(const AffineRescaler& r, const Matrix& samples)
{
  check_dim(r, samples);
  return ((samples.array().rowwise() / r.scale.transpose().array())
            .matrix()
            .rowwise() +
          r.shift.transpose());
}

double
apply_time(const AffineRescaler& r, double t)
{
  return (t - r.time_origin) / r.time_span;
}

double
invert_time(const AffineRescaler& r, double t)
{
  return t * r.time_span + r.time_origin;
}

SnapshotSeries
apply_rescaler(const AffineRescaler& r, const SnapshotSeries& series)
{
  std::vector<Snapshot> out;
  out.reserve(series.size());
  for (const auto& s : series.snapshots())
    out.emplace_back(apply_time(r, s.time()), apply_rescaler(r, s.samples()));
  return SnapshotSeries(std::move(out));
}

unsigned
default_thread_count()
{
  return std::max(1u, std::thread::hardware_concurrency());
}

void
parallel_for(std::size_t n,
             unsigned threads,
             const std::function<void(std::size_t, std::size_t)>& body)
{
  if (n == 0)
    return;
  if (threads == 0)
    threads = default_thread_count();
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e)
      break;
    pool.emplace_back([&, w, b, e] {
      try {
        body(b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  for (auto& err : errors)
    if (err)
      std::rethrow_exception(err);
}

std::uint64_t
mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double
pairwise_sum(std::span<const double> values)
{
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values)
      s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace dppmm
