#include "dppmm/ppmm.hpp"

#include <cmath>
#include <string>

namespace dppmm {

PpmmMap::PpmmMap(Eigen::Index dim, std::vector<PpmmStep> steps)
  : dim_(dim)
{
  if (dim_ < 1)
    throw InvalidInput("PPMM map dimension must be positive");
  for (auto& s : steps)
    push_back(std::move(s));
}

void
PpmmMap::push_back(PpmmStep step)
{
  if (step.direction.dim() != dim_)
    throw InvalidInput("PPMM step direction has dimension " +
                       std::to_string(step.direction.dim()) + ", expected " +
                       std::to_string(dim_));
  steps_.push_back(std::move(step));
}

std::string_view
to_string(StopReason r)
{
  switch (r) {
    case StopReason::tolerance:
      return "tolerance";
    case StopReason::max_iter:
      return "max_iter";
    case StopReason::no_informative_direction:
      return "no_informative_direction";
  }
  return "unknown";
}

StopReason
stop_reason_from_string(std::string_view s)
{
  if (s == "tolerance")
    return StopReason::tolerance;
  if (s == "max_iter")
    return StopReason::max_iter;
  if (s == "no_informative_direction")
    return StopReason::no_informative_direction;
  throw InvalidInput("unknown stop reason '" + std::string(s) + "'");
}

void
apply_step(const PpmmStep& step, Matrix& x)
{
  const Vector& p = step.direction.components();
  Vector proj = x * p;
  Vector moved = proj;
  evaluate(step.map, std::span<double>(moved.data(), moved.size()));
  x.noalias() += (moved - proj) * p.transpose();
}

Matrix
eval_ppmm(const PpmmMap& map, const Matrix& x, unsigned threads)
{
  if (x.cols() != map.dim())
    throw InvalidInput("eval_ppmm: input has " + std::to_string(x.cols()) +
                       " columns, map expects " + std::to_string(map.dim()));
  Matrix out = x;
  if (threads == 1 || x.rows() < 2048) {
    for (const auto& step : map.steps())
      apply_step(step, out);
    return out;
  }
  // rows are independent: push contiguous row blocks through the chain
  parallel_for(static_cast<std::size_t>(x.rows()), threads,
               [&](std::size_t b, std::size_t e) {
                 const auto rows = static_cast<Eigen::Index>(e - b);
                 Matrix block = out.middleRows(static_cast<Eigen::Index>(b), rows);
                 for (const auto& step : map.steps())
                   apply_step(step, block);
                 out.middleRows(static_cast<Eigen::Index>(b), rows) = block;
               });
  return out;
}

namespace {

double
rms_displacement(const Matrix& moved, const Matrix& x)
{
  if (x.rows() == 0)
    return 0.0;
  return std::sqrt((moved - x).squaredNorm() / static_cast<double>(x.rows()));
}

} // namespace

double
approx_w2(const PpmmMap& map, const Matrix& x)
{
  return rms_displacement(eval_ppmm(map, x), x);
}

bool
w2_converged(std::span<const double> history, double alpha)
{
  if (history.size() < 2)
    return false;
  const double cur = history[history.size() - 1];
  const double prev = history[history.size() - 2];
  if (cur == 0.0)
    return true;
  return std::abs(cur - prev) / std::abs(cur) <= alpha;
}

PpmmFit
fit_ppmm(const Matrix& x, const Matrix& y, const PpmmConfig& cfg)
{
  if (x.rows() < 2 || y.rows() < 2)
    throw InvalidInput("PPMM needs at least two samples in each set");
  if (x.cols() != y.cols())
    throw InvalidInput("PPMM inputs must share their dimension");
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw InvalidInput("PPMM tolerance alpha must lie in [0, 1]");
  if (cfg.method == OneDimMethod::regularized)
    cfg.kde.validate();

  const auto d = x.cols();
  const std::size_t max_iter =
    cfg.max_iter > 0 ? cfg.max_iter : 10 * static_cast<std::size_t>(d);

  PpmmFit fit{ PpmmMap(d), {} };
  Matrix current = x;
  std::vector<double> proj_x(static_cast<std::size_t>(x.rows()));
  std::vector<double> proj_y(static_cast<std::size_t>(y.rows()));
  fit.report.stop_reason = StopReason::max_iter;

  for (std::size_t k = 0; k < max_iter; ++k) {
    auto save = save_direction(current, y, cfg.ridge);
    if (!save.diagnostics.informative) {
      fit.report.stop_reason = StopReason::no_informative_direction;
      break;
    }
    const Vector& p = save.direction.components();
    Eigen::Map<Vector>(proj_x.data(), x.rows()) = current * p;
    Eigen::Map<Vector>(proj_y.data(), y.rows()) = y * p;

    Map1D eta = cfg.method == OneDimMethod::sorted
                  ? Map1D(fit_sorted_map(proj_x, proj_y))
                  : Map1D(fit_regularized_map(proj_x, proj_y, cfg.kde));
    PpmmStep step{ std::move(save.direction), std::move(eta) };
    apply_step(step, current);
    fit.map.push_back(std::move(step));

    // current == phi_k(x) by construction, so this is W2 over the original x
    fit.report.w2_history.push_back(rms_displacement(current, x));
    if (w2_converged(fit.report.w2_history, cfg.alpha)) {
      fit.report.stop_reason = StopReason::tolerance;
      break;
    }
  }
  fit.report.k_final = fit.map.iterations();
  return fit;
}

} // namespace dppmm
