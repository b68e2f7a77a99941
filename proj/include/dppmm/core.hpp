#pragma once

#include "dppmm/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dppmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

//! Samples drawn from the density at one fixed time. Rows are samples.
class Snapshot
{
public:
  Snapshot(double time, Matrix samples);

  double time() const { return time_; }
  const Matrix& samples() const { return samples_; }
  Eigen::Index size() const { return samples_.rows(); }
  Eigen::Index dim() const { return samples_.cols(); }

private:
  double time_;
  Matrix samples_;
};

//! Time-ordered snapshots sharing one dimension. Sample counts may differ.
class SnapshotSeries
{
public:
  explicit SnapshotSeries(std::vector<Snapshot> snapshots);

  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  const Snapshot& operator[](std::size_t j) const { return snapshots_[j]; }
  std::size_t size() const { return snapshots_.size(); }
  Eigen::Index dim() const { return snapshots_.front().dim(); }
  std::vector<double> times() const;

  //! Keep only the snapshots at the given (ascending) positions.
  SnapshotSeries select(std::span<const std::size_t> indices) const;

private:
  std::vector<Snapshot> snapshots_;
};

//! Componentwise affine map into [-1,1]^d together with a time map onto
//! [0,1]: x -> (x - shift) * scale, t -> (t - time_origin) / time_span.
struct AffineRescaler
{
  Vector shift;
  Vector scale;
  double time_origin = 0.0;
  double time_span = 1.0;

  static AffineRescaler identity(Eigen::Index d);

  Eigen::Index dim() const { return shift.size(); }
  void validate() const;
};

AffineRescaler fit_rescaler(const SnapshotSeries& series);

Matrix apply_rescaler(const AffineRescaler& r, const Matrix& samples);
Matrix invert_rescaler(const AffineRescaler& r, const Matrix& samples);
double apply_time(const AffineRescaler& r, double t);
double invert_time(const AffineRescaler& r, double t);

//! Rescale samples and times of every snapshot.
SnapshotSeries apply_rescaler(const AffineRescaler& r,
                              const SnapshotSeries& series);

// ---------------------------------------------------------------------------
// small shared utilities

//! Number of worker threads used when a caller passes 0.
unsigned default_thread_count();

//! Runs body(begin, end) over contiguous chunks of [0, n). The partition
//! only affects scheduling; callers write to disjoint per-index slots.
void parallel_for(std::size_t n,
                  unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

//! SplitMix64 finaliser; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

//! Pairwise (cascade) summation; order-stable for a fixed input order.
double pairwise_sum(std::span<const double> values);

} // namespace dppmm
