#pragma once

#include "dppmm/core.hpp"
#include "dppmm/ppmm.hpp"
#include "dppmm/transport_spline.hpp"

#include <cstdint>
#include <vector>

namespace dppmm {

//! Gaussian base, rescaler and one PPMM map per snapshot time. Map j pushes
//! samples at time j-1 (the base for j = 0) to time j.
struct DppmmModel
{
  Vector base_mean;
  Vector base_var; //!< diagonal of the base covariance
  AffineRescaler rescaler;
  std::vector<double> times; //!< rescaled, in [0, 1]
  std::vector<PpmmMap> maps;

  Eigen::Index dim() const { return base_mean.size(); }
  void validate() const;
};

struct DppmmConfig
{
  PpmmConfig ppmm;
  //! Fit the rescaler on the series first; otherwise the series must
  //! already be rescaled (times in [0, 1]) and the identity is stored.
  bool rescale = true;
  bool parallel = false;
  unsigned threads = 0;
  std::uint64_t seed = 0; //!< training base samples
  double base_mean = 0.0;
  double base_var = 0.01;
};

struct DppmmTraining
{
  DppmmModel model;
  std::vector<PpmmFitReport> reports;
  std::vector<double> seconds; //!< wall time of each pair fit
};

DppmmTraining train_dppmm(const SnapshotSeries& series,
                          const DppmmConfig& cfg);

//! Rows ~ N(mean, diag(var)), reproducible from `seed`.
Matrix sample_gaussian(const Vector& mean,
                       const Vector& var,
                       Eigen::Index rows,
                       std::uint64_t seed);

//! New coupled samples at every model time (rescaled units). Row n of every
//! returned matrix belongs to the same trajectory.
std::vector<Matrix> generate(const DppmmModel& model,
                             Eigen::Index count,
                             std::uint64_t seed,
                             unsigned threads = 1);

//! Transport splines through generate()'s output.
SplineBundle generate_splines(const DppmmModel& model,
                              Eigen::Index count,
                              std::uint64_t seed,
                              unsigned threads = 1);

} // namespace dppmm
