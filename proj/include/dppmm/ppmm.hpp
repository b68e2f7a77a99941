#pragma once

#include "dppmm/ot1d.hpp"
#include "dppmm/projection.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dppmm {

struct PpmmStep
{
  Direction direction;
  Map1D map;
};

//! phi_k(x): starting from phi_0(x) = x, each step moves x along its
//! direction p by eta(x . p) - x . p.
class PpmmMap
{
public:
  explicit PpmmMap(Eigen::Index dim, std::vector<PpmmStep> steps = {});

  Eigen::Index dim() const { return dim_; }
  std::size_t iterations() const { return steps_.size(); }
  const std::vector<PpmmStep>& steps() const { return steps_; }

  void push_back(PpmmStep step);

private:
  Eigen::Index dim_;
  std::vector<PpmmStep> steps_;
};

enum class StopReason
{
  tolerance,
  max_iter,
  no_informative_direction
};

std::string_view to_string(StopReason r);
StopReason stop_reason_from_string(std::string_view s);

struct PpmmFitReport
{
  std::vector<double> w2_history;
  StopReason stop_reason = StopReason::max_iter;
  std::size_t k_final = 0;
};

enum class OneDimMethod
{
  sorted,
  regularized
};

struct PpmmConfig
{
  double alpha = 1e-3;
  //! 0 selects the default of 10 * d.
  std::size_t max_iter = 0;
  OneDimMethod method = OneDimMethod::regularized;
  KdeConfig kde;
  double ridge = kDefaultRidge;
};

struct PpmmFit
{
  PpmmMap map;
  PpmmFitReport report;
};

//! Applies one step to every row of `x` in place.
void apply_step(const PpmmStep& step, Matrix& x);

Matrix eval_ppmm(const PpmmMap& map, const Matrix& x, unsigned threads = 1);

//! Root-mean-square displacement of the rows of `x` under the full chain.
double approx_w2(const PpmmMap& map, const Matrix& x);

//! Relative-change stopping rule on a W2 history (needs >= 2 entries);
//! a zero latest value counts as converged.
bool w2_converged(std::span<const double> history, double alpha);

PpmmFit fit_ppmm(const Matrix& x, const Matrix& y, const PpmmConfig& cfg);

} // namespace dppmm
