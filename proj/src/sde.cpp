#include "dppmm/sde.hpp"

#include <cmath>
#include <random>
#include <string>

namespace dppmm {

std::string_view
to_string(SystemKind k)
{
  switch (k) {
    case SystemKind::van_der_pol:
      return "vdp";
    case SystemKind::ornstein_uhlenbeck:
      return "ou";
    case SystemKind::lorenz96:
      return "lorenz96";
  }
  return "unknown";
}

SystemKind
system_kind_from_string(std::string_view s)
{
  if (s == "vdp")
    return SystemKind::van_der_pol;
  if (s == "ou")
    return SystemKind::ornstein_uhlenbeck;
  if (s == "lorenz96")
    return SystemKind::lorenz96;
  throw InvalidInput("unknown system '" + std::string(s) +
                     "' (expected vdp, ou or lorenz96)");
}

void
SdeSystem::validate() const
{
  switch (kind) {
    case SystemKind::van_der_pol:
      if (dim != 2)
        throw InvalidInput("the Van der Pol system has d = 2 (got d = " +
                           std::to_string(dim) + ")");
      break;
    case SystemKind::ornstein_uhlenbeck:
      if (dim < 2)
        throw InvalidInput("the OU system requires d >= 2 (got d = " +
                           std::to_string(dim) + ")");
      break;
    case SystemKind::lorenz96:
      if (dim < 4)
        throw InvalidInput("the Lorenz-96 system requires d >= 4 (got d = " +
                           std::to_string(dim) + ")");
      break;
  }
  if (!std::isfinite(parameter))
    throw InvalidInput("system parameter must be finite");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion))
    throw InvalidInput("diffusion coefficient must be >= 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidInput("time horizon must be positive");
  if (init.mean.size() != dim ||
      (init.is_mixture() && init.mean2.size() != dim))
    throw InvalidInput("initial law dimension does not match the system");
  if (!(init.sigma >= 0.0) || !std::isfinite(init.sigma) ||
      !init.mean.allFinite() || !init.mean2.allFinite())
    throw InvalidInput("initial law parameters must be finite, sigma >= 0");
}

void
drift(const SdeSystem& sys, const double* x, double* out)
{
  const auto d = sys.dim;
  const double p = sys.parameter;
  switch (sys.kind) {
    case SystemKind::van_der_pol:
      out[0] = x[1];
      out[1] = p * (1.0 - x[0] * x[0]) * x[1] - x[0];
      return;
    case SystemKind::ornstein_uhlenbeck:
      for (Eigen::Index i = 0; i < d; ++i)
        out[i] = -p * x[i];
      return;
    case SystemKind::lorenz96:
      for (Eigen::Index i = 0; i < d; ++i) {
        const double xp1 = x[(i + 1) % d];
        const double xm1 = x[(i + d - 1) % d];
        const double xm2 = x[(i + d - 2) % d];
        out[i] = (xp1 - xm2) * xm1 - x[i] + p;
      }
      return;
  }
}

Vector
drift(const SdeSystem& sys, const Vector& x)
{
  if (x.size() != sys.dim)
    throw InvalidInput("drift: state has dimension " +
                       std::to_string(x.size()) + ", system has " +
                       std::to_string(sys.dim));
  Vector out(sys.dim);
  drift(sys, x.data(), out.data());
  return out;
}

SdeSystem
van_der_pol_system()
{
  SdeSystem s;
  s.kind = SystemKind::van_der_pol;
  s.dim = 2;
  s.parameter = 1.0;
  s.diffusion = 2.5e-3;
  s.horizon = 6.0;
  s.init.mean = Vector::Constant(2, 1.0);
  s.init.sigma = 5e-2;
  return s;
}

SdeSystem
ou_system(Eigen::Index d)
{
  SdeSystem s;
  s.kind = SystemKind::ornstein_uhlenbeck;
  s.dim = d;
  s.parameter = 0.1;
  s.diffusion = 5e-2;
  s.horizon = 15.0;
  if (d >= 1) {
    s.init.mean = Vector::Constant(d, 10.0);
    s.init.mean2 = Vector::Constant(d, 10.0);
    s.init.mean(0) = -10.0;
  }
  s.init.sigma = 5e-2;
  return s;
}

SdeSystem
lorenz96_system(Eigen::Index d)
{
  SdeSystem s;
  s.kind = SystemKind::lorenz96;
  s.dim = d;
  s.parameter = 2.0;
  s.diffusion = 5e-3;
  s.horizon = 5.0;
  if (d >= 1) {
    s.init.mean = Vector::Zero(d);
    s.init.mean(0) = 4.0;
  }
  s.init.sigma = 1e-1;
  return s;
}

SdeSystem
benchmark_system(SystemKind kind, Eigen::Index d)
{
  SdeSystem s;
  switch (kind) {
    case SystemKind::van_der_pol:
      s = van_der_pol_system();
      s.dim = d;
      break;
    case SystemKind::ornstein_uhlenbeck:
      s = ou_system(d);
      break;
    case SystemKind::lorenz96:
      s = lorenz96_system(d);
      break;
  }
  s.validate();
  return s;
}

std::size_t
step_count(double horizon, double dt)
{
  if (!(dt > 0.0) || !(dt <= horizon))
    throw InvalidInput("time step must satisfy 0 < dt <= T");
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

std::vector<std::size_t>
even_indices(std::size_t last, std::size_t count)
{
  if (count < 2)
    throw InvalidInput("need at least two snapshots");
  if (count > last + 1)
    throw InvalidInput("cannot pick " + std::to_string(count) +
                       " snapshots from " + std::to_string(last + 1) +
                       " stored steps");
  std::vector<std::size_t> idx(count);
  for (std::size_t j = 0; j < count; ++j)
    idx[j] = static_cast<std::size_t>(
      std::llround(static_cast<double>(j) * static_cast<double>(last) /
                   static_cast<double>(count - 1)));
  return idx;
}

TrajectoryBundle
euler_maruyama(const SdeSystem& sys,
               Eigen::Index trajectories,
               std::uint64_t seed,
               const SimulationOptions& opts)
{
  sys.validate();
  if (trajectories < 1)
    throw InvalidInput("need at least one trajectory");
  const std::size_t steps = step_count(sys.horizon, opts.dt);

  TrajectoryBundle out;
  out.dt = opts.dt;
  if (opts.keep.empty()) {
    out.steps.resize(steps + 1);
    for (std::size_t s = 0; s <= steps; ++s)
      out.steps[s] = s;
  } else {
    out.steps = opts.keep;
    for (std::size_t k = 0; k < out.steps.size(); ++k) {
      if (out.steps[k] > steps)
        throw InvalidInput("requested step " + std::to_string(out.steps[k]) +
                           " beyond the last step " + std::to_string(steps));
      if (k > 0 && !(out.steps[k] > out.steps[k - 1]))
        throw InvalidInput("requested steps must be strictly increasing");
    }
  }
  for (auto s : out.steps)
    out.times.push_back(static_cast<double>(s) * opts.dt);
  out.states.assign(out.steps.size(), Matrix(trajectories, sys.dim));

  const auto d = sys.dim;
  const double noise = std::sqrt(2.0 * sys.diffusion * opts.dt);
  const double dt = opts.dt;

  auto simulate = [&](std::size_t begin, std::size_t end) {
    Vector x(d), v(d);
    for (std::size_t n = begin; n < end; ++n) {
      std::mt19937_64 rng(mix_seed(seed, n));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      const Vector* centre = &sys.init.mean;
      if (sys.init.is_mixture() && coin(rng) >= 0.5)
        centre = &sys.init.mean2;
      for (Eigen::Index i = 0; i < d; ++i)
        x(i) = (*centre)(i) + sys.init.sigma * normal(rng);

      const auto row = static_cast<Eigen::Index>(n);
      std::size_t next = 0;
      for (std::size_t s = 0;; ++s) {
        if (next < out.steps.size() && out.steps[next] == s)
          out.states[next++].row(row) = x.transpose();
        if (s == steps || next == out.steps.size())
          break;
        drift(sys, x.data(), v.data());
        for (Eigen::Index i = 0; i < d; ++i)
          x(i) += v(i) * dt + noise * normal(rng);
        if (!x.allFinite())
          throw NumericError("trajectory " + std::to_string(n) +
                             " blew up at step " + std::to_string(s + 1));
      }
    }
  };
  parallel_for(static_cast<std::size_t>(trajectories),
               opts.threads == 0 ? default_thread_count() : opts.threads,
               simulate);
  return out;
}

SnapshotSeries
subsample_snapshots(const TrajectoryBundle& bundle, std::size_t count)
{
  if (bundle.states.empty())
    throw InvalidInput("trajectory bundle is empty");
  const auto idx = even_indices(bundle.states.size() - 1, count);
  std::vector<Snapshot> snaps;
  snaps.reserve(count);
  for (auto k : idx)
    snaps.emplace_back(bundle.times[k], bundle.states[k]);
  return SnapshotSeries(std::move(snaps));
}

Benchmark
make_benchmark(const SdeSystem& sys,
               Eigen::Index samples,
               std::uint64_t seed,
               std::size_t snapshots,
               double dt,
               unsigned threads)
{
  sys.validate();
  SimulationOptions opts;
  opts.dt = dt;
  opts.threads = threads;
  opts.keep = even_indices(step_count(sys.horizon, dt), snapshots);

  const auto train_raw =
    subsample_snapshots(euler_maruyama(sys, samples, seed, opts), snapshots);
  const auto test_raw = subsample_snapshots(
    euler_maruyama(sys, samples, mix_seed(seed, 0x7e57'5e7ULL), opts),
    snapshots);
  const auto rescaler = fit_rescaler(train_raw);
  return Benchmark{ apply_rescaler(rescaler, train_raw),
                    apply_rescaler(rescaler, test_raw),
                    rescaler };
}

} // namespace dppmm
