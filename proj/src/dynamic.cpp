#include "dppmm/dynamic.hpp"

#include <cmath>
#include <algorithm>
#include <chrono>
#include <optional>
#include <random>
#include <string>

namespace dppmm {

void
DppmmModel::validate() const
{
  const auto d = base_mean.size();
  if (d < 1 || base_var.size() != d)
    throw InvalidInput("model base mean/variance sizes disagree");
  if (!base_mean.allFinite() || !base_var.allFinite() ||
      (base_var.array() <= 0.0).any())
    throw InvalidInput("model base variances must be positive and finite");
  rescaler.validate();
  if (rescaler.dim() != d)
    throw InvalidInput("model rescaler dimension disagrees with base");
  if (times.empty() || times.size() != maps.size())
    throw InvalidInput("model needs one map per snapshot time");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j]))
      throw InvalidInput("model times must be finite");
    if (j > 0 && !(times[j] > times[j - 1]))
      throw InvalidInput("model times must be strictly increasing");
  }
  for (std::size_t j = 0; j < maps.size(); ++j) {
    if (maps[j].dim() != d)
      throw InvalidInput("map " + std::to_string(j) +
                         " has the wrong dimension");
    for (const auto& step : maps[j].steps()) {
      if (std::abs(step.direction.components().norm() - 1.0) > 1e-12)
        throw InvalidInput("map " + std::to_string(j) +
                           " has a direction that is not unit norm");
      validate_map(step.map);
    }
  }
}

Matrix
sample_gaussian(const Vector& mean,
                const Vector& var,
                Eigen::Index rows,
                std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = mean.size();
  Matrix out(rows, d);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < d; ++k)
      out(i, k) = mean(k) + std::sqrt(var(k)) * normal(rng);
  return out;
}

DppmmTraining
train_dppmm(const SnapshotSeries& raw, const DppmmConfig& cfg)
{
  if (raw.size() < 2)
    throw InvalidInput("D-PPMM needs at least two snapshots");
  if (!(cfg.base_var > 0.0))
    throw InvalidInput("base variance must be positive");

  const auto d = raw.dim();
  const AffineRescaler rescaler =
    cfg.rescale ? fit_rescaler(raw) : AffineRescaler::identity(d);
  const SnapshotSeries series =
    cfg.rescale ? apply_rescaler(rescaler, raw) : raw;
  if (!cfg.rescale)
    for (const auto& s : series.snapshots())
      if (!(s.time() >= 0.0 && s.time() <= 1.0))
        throw InvalidInput("series is marked as rescaled but has time " +
                           std::to_string(s.time()) + " outside [0, 1]");

  DppmmTraining out;
  auto& model = out.model;
  model.base_mean = Vector::Constant(d, cfg.base_mean);
  model.base_var = Vector::Constant(d, cfg.base_var);
  model.rescaler = rescaler;
  model.times = series.times();

  const Matrix base =
    sample_gaussian(model.base_mean, model.base_var, series[0].size(), cfg.seed);

  const std::size_t M = series.size();
  auto fit_pair = [&](std::size_t j) {
    const Matrix& source = j == 0 ? base : series[j - 1].samples();
    try {
      return fit_ppmm(source, series[j].samples(), cfg.ppmm);
    } catch (const InvalidInput& e) {
      throw InvalidInput("pair " + std::to_string(j) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("pair " + std::to_string(j) + ": " + e.what());
    }
  };

  std::vector<std::optional<PpmmFit>> fits(M);
  std::vector<double> seconds(M, 0.0);
  auto run_pair = [&](std::size_t j) {
    const auto start = std::chrono::steady_clock::now();
    fits[j].emplace(fit_pair(j));
    seconds[j] = std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  };
  if (cfg.parallel) {
    const unsigned threads =
      cfg.threads == 0 ? default_thread_count() : cfg.threads;
    parallel_for(M, std::min<unsigned>(threads, static_cast<unsigned>(M)),
                 [&](std::size_t b, std::size_t e) {
                   for (std::size_t j = b; j < e; ++j)
                     run_pair(j);
                 });
  } else {
    for (std::size_t j = 0; j < M; ++j)
      run_pair(j);
  }

  for (auto& f : fits) {
    model.maps.push_back(std::move(f->map));
    out.reports.push_back(std::move(f->report));
  }
  out.seconds = std::move(seconds);
  return out;
}

std::vector<Matrix>
generate(const DppmmModel& model,
         Eigen::Index count,
         std::uint64_t seed,
         unsigned threads)
{
  if (count < 1)
    throw InvalidInput("generate needs a positive sample count");
  Matrix current = sample_gaussian(model.base_mean, model.base_var, count, seed);
  std::vector<Matrix> out;
  out.reserve(model.maps.size());
  for (const auto& map : model.maps) {
    current = eval_ppmm(map, current, threads);
    out.push_back(current);
  }
  return out;
}

SplineBundle
generate_splines(const DppmmModel& model,
                 Eigen::Index count,
                 std::uint64_t seed,
                 unsigned threads)
{
  const auto coupled = generate(model, count, seed, threads);
  return fit_transport_splines(model.times, coupled);
}

} // namespace dppmm
