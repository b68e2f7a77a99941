#pragma once

#include "dppmm/core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace dppmm {

//! Strictly increasing positive kernel bandwidths.
class BandwidthGrid
{
public:
  explicit BandwidthGrid(std::vector<double> values);

  //! `count` values logarithmically spaced in [lo, hi].
  static BandwidthGrid log_spaced(double lo, double hi, std::size_t count);
  //! 15 values from 1e-2 to 1e2.
  static BandwidthGrid standard();

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

private:
  std::vector<double> values_;
};

enum class MmdEstimator
{
  quadratic,
  linear,
  automatic //!< quadratic when min(N) <= 2000, linear above
};

std::string_view to_string(MmdEstimator e);
MmdEstimator mmd_estimator_from_string(std::string_view s);

//! Resolves `automatic` for the given sample sizes.
MmdEstimator resolve_estimator(MmdEstimator e, Eigen::Index n1, Eigen::Index n2);

//! exp(-|x - y|^2 / (2 sigma^2))
double gaussian_kernel(const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& y,
                       double sigma);

//! Unbiased quadratic-time MMD^2. Unequal sizes use separate within-group
//! normalisations 1/(N1(N1-1)), 1/(N2(N2-1)) and 2/(N1 N2) for the cross
//! term.
double mmd2(const Matrix& x, const Matrix& y, double sigma);

//! mmd2 at every grid bandwidth with one pass over the pairwise distances.
std::vector<double> mmd2_all(const Matrix& x, const Matrix& y,
                             std::span<const double> sigmas);

struct LinearMmd
{
  double value = 0.0;
  bool dropped_last = false; //!< N was odd and the final sample was unused
};

//! Linear-time estimate over the disjoint pairs (2i, 2i+1). Needs equal
//! sizes N >= 4.
LinearMmd linear_mmd2(const Matrix& x, const Matrix& y, double sigma);
std::vector<double> linear_mmd2_all(const Matrix& x, const Matrix& y,
                                    std::span<const double> sigmas);

struct GmmdResult
{
  double value = 0.0;
  double sigma = 0.0;          //!< grid bandwidth attaining the maximum
  MmdEstimator estimator = MmdEstimator::quadratic;
};

//! Maximum over the grid of the chosen estimator.
GmmdResult gmmd2(const Matrix& x,
                 const Matrix& y,
                 const BandwidthGrid& grid,
                 MmdEstimator estimator = MmdEstimator::automatic);

struct SeriesGmmd
{
  std::vector<double> times;
  std::vector<GmmdResult> per_snapshot;
  double average = 0.0;
};

//! Snapshot-averaged GMMD^2. Times must agree within 1e-9.
SeriesGmmd avg_gmmd2(std::span<const Snapshot> a,
                     std::span<const Snapshot> b,
                     const BandwidthGrid& grid,
                     MmdEstimator estimator = MmdEstimator::automatic,
                     unsigned threads = 1);

SeriesGmmd avg_gmmd2(const SnapshotSeries& a,
                     const SnapshotSeries& b,
                     const BandwidthGrid& grid,
                     MmdEstimator estimator = MmdEstimator::automatic,
                     unsigned threads = 1);

} // namespace dppmm
