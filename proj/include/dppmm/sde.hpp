#pragma once

#include "dppmm/core.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dppmm {

enum class SystemKind
{
  van_der_pol,
  ornstein_uhlenbeck,
  lorenz96
};

std::string_view to_string(SystemKind k);
SystemKind system_kind_from_string(std::string_view s); // "vdp", "ou", "lorenz96"

//! Either N(mean, sigma^2 I) or the equal mixture of N(mean, .) and
//! N(mean2, .).
struct InitialLaw
{
  Vector mean;
  Vector mean2; //!< empty for a single Gaussian
  double sigma = 0.0;

  bool is_mixture() const { return mean2.size() > 0; }
};

//! dX = v(X) dt + sqrt(2 D) dW on [0, horizon].
struct SdeSystem
{
  SystemKind kind = SystemKind::van_der_pol;
  Eigen::Index dim = 2;
  double parameter = 1.0; //!< c, lambda or F depending on kind
  double diffusion = 0.0;
  double horizon = 1.0;
  InitialLaw init;

  void validate() const;
};

//! Drift v(x); `out` must have the system dimension.
void drift(const SdeSystem& sys, const double* x, double* out);
Vector drift(const SdeSystem& sys, const Vector& x);

//! Reference systems with the standard benchmark parameters.
SdeSystem van_der_pol_system();
SdeSystem ou_system(Eigen::Index d);
SdeSystem lorenz96_system(Eigen::Index d);
SdeSystem benchmark_system(SystemKind kind, Eigen::Index d);

struct SimulationOptions
{
  double dt = 1e-3;
  //! Step indices (0 = initial state) to keep; empty keeps every step.
  std::vector<std::size_t> keep;
  unsigned threads = 1;
};

//! states[s] holds the N trajectories (rows) at times[s].
struct TrajectoryBundle
{
  double dt = 0.0;
  std::vector<std::size_t> steps;
  std::vector<double> times;
  std::vector<Matrix> states;
};

//! Number of Euler-Maruyama steps for horizon T: ceil(T / dt).
std::size_t step_count(double horizon, double dt);

//! Evenly spaced indices 0 = i_0 < ... < i_{M-1} = last, rounded to the
//! nearest integer.
std::vector<std::size_t> even_indices(std::size_t last, std::size_t count);

//! Euler-Maruyama paths. Trajectory n draws its initial state and noise from
//! its own stream mix_seed(seed, n), so the result does not depend on the
//! thread count.
TrajectoryBundle euler_maruyama(const SdeSystem& sys,
                                Eigen::Index trajectories,
                                std::uint64_t seed,
                                const SimulationOptions& opts = {});

//! M snapshots at evenly spaced stored steps, first and last included.
SnapshotSeries subsample_snapshots(const TrajectoryBundle& bundle,
                                   std::size_t count);

struct Benchmark
{
  SnapshotSeries train;
  SnapshotSeries test;
  AffineRescaler rescaler; //!< fitted on the raw training series
};

//! Simulates train and test sets from independent seeds, keeps `snapshots`
//! evenly spaced times of each and rescales both with the training fit.
Benchmark make_benchmark(const SdeSystem& sys,
                         Eigen::Index samples,
                         std::uint64_t seed,
                         std::size_t snapshots = 11,
                         double dt = 1e-3,
                         unsigned threads = 1);

} // namespace dppmm
