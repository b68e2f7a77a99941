#pragma once

#include "dppmm/core.hpp"

#include <span>
#include <variant>
#include <vector>

namespace dppmm {

enum class BandwidthRule
{
  scott,
  isj,
  fixed
};

struct KdeConfig
{
  BandwidthRule rule = BandwidthRule::scott;
  double fixed_bandwidth = 0.0; //!< used when rule == fixed
  std::size_t bins = 500;       //!< B, number of histogram cells
  double margin = 0.1;          //!< L, padding of the map domain
  double floor = 1e-8;          //!< epsilon added to the densities
  std::size_t isj_grid = 1024;  //!< power of two

  void validate() const;
};

// ---------------------------------------------------------------------------
// bandwidths

struct Bandwidth
{
  double h = 0.0;
  //! True when the rule could not be applied and a fallback was used
  //! (zero spread for Scott; too few samples or no root for ISJ).
  bool fallback = false;
};

//! h = s * N^(-1/5), s = min(sample std, IQR / 1.349). Zero spread returns
//! 1e-3 * fallback_span with the fallback flag set.
Bandwidth bandwidth_scott(std::span<const double> samples,
                          double fallback_span = 1.0);

//! Improved Sheather-Jones (Botev et al.) fixed-point bandwidth on a
//! `grid_size` bin DCT. Falls back to Scott for N < 50 or when no root is
//! bracketed.
Bandwidth bandwidth_isj(std::span<const double> samples,
                        std::size_t grid_size = 1024,
                        double fallback_span = 1.0);

// ---------------------------------------------------------------------------
// kernel density estimation

//! Gaussian KDE on the equispaced ascending grid `z`. Samples are linearly
//! binned onto z and convolved with the kernel via a zero-padded FFT. The
//! result is clamped at zero and normalised so that dz * sum = 1.
Vector fft_kde(std::span<const double> samples, double h, const Vector& z);

//! Linear binning weights of `samples` on the grid z (total weight N).
Vector linear_bin(std::span<const double> samples, const Vector& z);

// ---------------------------------------------------------------------------
// one-dimensional maps

//! Monotone piecewise-linear map through (knots_x[i], knots_y[i]), extended
//! linearly beyond the extreme knots with nonnegative boundary slope.
struct SortedQuantileMap
{
  std::vector<double> knots_x;
  std::vector<double> knots_y;

  double operator()(double t) const;
  void validate() const;
};

//! eta(t) = Ginv(F(t)) on [lo, hi], identity outside. F and G are the
//! (regularised) KDE CDFs tabulated at the B cell centres z; the CDFs are
//! pinned to 0 at lo and 1 at hi for interpolation.
struct RegularizedMap
{
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> z;
  std::vector<double> cdf_source;
  std::vector<double> cdf_target;

  double operator()(double t) const;
  void validate() const;
};

using Map1D = std::variant<SortedQuantileMap, RegularizedMap>;

double evaluate(const Map1D& map, double t);
void evaluate(const Map1D& map, std::span<double> values); // in place
void validate_map(const Map1D& map);

SortedQuantileMap fit_sorted_map(std::span<const double> x,
                                 std::span<const double> y);

RegularizedMap fit_regularized_map(std::span<const double> x,
                                   std::span<const double> y,
                                   const KdeConfig& cfg);

//! Bandwidth for `samples` according to cfg.rule.
Bandwidth select_bandwidth(std::span<const double> samples,
                           const KdeConfig& cfg,
                           double span);

} // namespace dppmm
