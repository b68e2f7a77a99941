#include "dppmm/cli.hpp"

#include "dppmm/dynamic.hpp"
#include "dppmm/metrics.hpp"
#include "dppmm/model_io.hpp"
#include "dppmm/sde.hpp"
#include "dppmm/snapshot_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

namespace dppmm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double
seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json
rescaler_json(const AffineRescaler& r)
{
  return { { "shift", std::vector<double>(r.shift.data(), r.shift.data() + r.shift.size()) },
           { "scale", std::vector<double>(r.scale.data(), r.scale.data() + r.scale.size()) },
           { "time_origin", r.time_origin },
           { "time_span", r.time_span } };
}

unsigned
resolve_threads(unsigned t)
{
  return t == 0 ? default_thread_count() : t;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs
{
  std::string system;
  long d = 0;
  long n = 10000;
  std::size_t m = 11;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  unsigned threads = 0;
  std::string out;
};

int
cmd_simulate(const SimulateArgs& a, std::ostream& out)
{
  const auto kind = system_kind_from_string(a.system);
  Eigen::Index d = a.d;
  if (d == 0)
    d = kind == SystemKind::lorenz96 ? 4 : 2;
  const auto sys = benchmark_system(kind, d);
  if (a.n < 2)
    throw InvalidInput("--n must be at least 2");

  const auto bench = make_benchmark(sys, a.n, a.seed, a.m, a.dt,
                                    resolve_threads(a.threads));
  const fs::path root(a.out);
  write_snapshot_dir(root / "train", bench.train);
  write_snapshot_dir(root / "test", bench.test);
  {
    std::ofstream f(root / "rescaler.json", std::ios::binary);
    f << rescaler_json(bench.rescaler).dump(2) << '\n';
    if (!f)
      throw std::runtime_error("cannot write " + (root / "rescaler.json").string());
  }

  std::vector<double> original;
  for (double t : bench.train.times())
    original.push_back(invert_time(bench.rescaler, t));
  json summary = { { "command", "simulate" },
                   { "system", to_string(kind) },
                   { "d", d },
                   { "n", a.n },
                   { "m", a.m },
                   { "seed", a.seed },
                   { "dt", a.dt },
                   { "train", (root / "train").string() },
                   { "test", (root / "test").string() },
                   { "times", original },
                   { "rescaler", rescaler_json(bench.rescaler) } };
  out << summary.dump() << '\n';
  return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs
{
  std::string data;
  std::string out;
  double alpha = 1e-3;
  std::size_t bins = 500;
  double margin = 0.1;
  double epsilon = 1e-8;
  std::string bandwidth = "scott";
  std::string method = "regularized";
  std::size_t max_iter = 0;
  std::uint64_t seed = 0;
  bool parallel = false;
  unsigned threads = 0;
  std::vector<std::size_t> keep;
};

int
cmd_train(const TrainArgs& a, std::ostream& out)
{
  DppmmConfig cfg;
  cfg.ppmm.alpha = a.alpha;
  cfg.ppmm.max_iter = a.max_iter;
  cfg.ppmm.method = one_dim_method_from_string(a.method);
  cfg.ppmm.kde.bins = a.bins;
  cfg.ppmm.kde.margin = a.margin;
  cfg.ppmm.kde.floor = a.epsilon;
  parse_bandwidth_rule(a.bandwidth, cfg.ppmm.kde);
  cfg.ppmm.kde.validate();
  if (!(a.alpha > 0.0))
    throw InvalidInput("--alpha must be positive");
  cfg.seed = a.seed;
  cfg.parallel = a.parallel;
  cfg.threads = resolve_threads(a.threads);

  const auto all = read_snapshot_dir(a.data);
  std::vector<std::size_t> indices = a.keep;
  if (indices.empty())
    for (std::size_t j = 0; j < all.size(); ++j)
      indices.push_back(j);
  for (std::size_t k = 1; k < indices.size(); ++k)
    if (!(indices[k] > indices[k - 1]))
      throw InvalidInput("--keep-indices must be strictly increasing");
  const auto series = all.select(indices);

  const auto start = Clock::now();
  auto training = train_dppmm(series, cfg);
  const double total = seconds_since(start);

  ModelFile file;
  file.model = std::move(training.model);
  file.provenance.seed = a.seed;
  file.provenance.ppmm = cfg.ppmm;
  file.provenance.snapshot_indices = indices;
  file.provenance.reports = training.reports;
  save_model(a.out, file);

  for (std::size_t j = 0; j < training.reports.size(); ++j) {
    const auto& r = training.reports[j];
    json line = { { "pair", j },
                  { "snapshot", indices[j] },
                  { "time", series[j].time() },
                  { "k_final", r.k_final },
                  { "w2", r.w2_history.empty() ? 0.0 : r.w2_history.back() },
                  { "stop_reason", to_string(r.stop_reason) },
                  { "seconds", training.seconds[j] } };
    out << line.dump() << '\n';
  }
  out << json{ { "command", "train" },
               { "model", a.out },
               { "maps", file.model.maps.size() },
               { "total_seconds", total } }
           .dump()
      << '\n';
  return kExitOk;
}

// --- sample / interpolate ---------------------------------------------------

struct SampleArgs
{
  std::string model;
  long n = 10000;
  std::uint64_t seed = 0;
  std::string out;
  bool keep_rescaled = false;
  unsigned threads = 0;
};

Snapshot
output_snapshot(const AffineRescaler& r, double t, const Matrix& x,
                bool keep_rescaled)
{
  if (keep_rescaled)
    return Snapshot(t, x);
  return Snapshot(invert_time(r, t), invert_rescaler(r, x));
}

int
cmd_sample(const SampleArgs& a, std::ostream& out)
{
  if (a.n < 1)
    throw InvalidInput("--n must be positive");
  const auto file = load_model(a.model);
  const auto& model = file.model;
  const auto gen = generate(model, a.n, a.seed, resolve_threads(a.threads));

  std::vector<Snapshot> snaps;
  for (std::size_t j = 0; j < gen.size(); ++j)
    snaps.push_back(output_snapshot(model.rescaler, model.times[j], gen[j],
                                    a.keep_rescaled));
  write_snapshot_dir(a.out, SnapshotSeries(std::move(snaps)));
  out << json{ { "command", "sample" },
               { "out", a.out },
               { "n", a.n },
               { "snapshots", gen.size() } }
           .dump()
      << '\n';
  return kExitOk;
}

struct InterpolateArgs
{
  SampleArgs sample;
  std::vector<double> times;
};

int
cmd_interpolate(const InterpolateArgs& ia, std::ostream& out)
{
  const auto& a = ia.sample;
  if (a.n < 1)
    throw InvalidInput("--n must be positive");
  if (ia.times.empty())
    throw InvalidInput("--times needs at least one value");
  for (std::size_t k = 1; k < ia.times.size(); ++k)
    if (!(ia.times[k] > ia.times[k - 1]))
      throw InvalidInput("--times must be strictly increasing");

  const auto file = load_model(a.model);
  const auto& model = file.model;
  if (model.times.size() < 2)
    throw InvalidInput("interpolation needs a model with at least two times");
  const auto& r = model.rescaler;
  const double lo = invert_time(r, model.times.front());
  const double hi = invert_time(r, model.times.back());

  // requested times in model units; values within rounding of a knot are
  // snapped onto it
  std::vector<double> internal;
  for (double t : ia.times) {
    if (!(t >= lo && t <= hi))
      throw OutOfRange("time " + format_double(t) +
                       " is outside the valid interval [" + format_double(lo) +
                       ", " + format_double(hi) + "]");
    double u = apply_time(r, t);
    for (std::size_t j = 0; j < model.times.size(); ++j)
      if (std::abs(u - model.times[j]) <= 1e-12 ||
          t == invert_time(r, model.times[j]))
        u = model.times[j];
    internal.push_back(std::clamp(u, model.times.front(), model.times.back()));
  }

  const auto bundle =
    generate_splines(model, a.n, a.seed, resolve_threads(a.threads));
  std::vector<Snapshot> snaps;
  for (std::size_t k = 0; k < internal.size(); ++k) {
    const Matrix x = bundle(internal[k]);
    if (a.keep_rescaled)
      snaps.emplace_back(internal[k], x);
    else
      snaps.emplace_back(ia.times[k], invert_rescaler(r, x));
  }
  write_snapshot_dir(a.out, SnapshotSeries(std::move(snaps)));
  out << json{ { "command", "interpolate" },
               { "out", a.out },
               { "n", a.n },
               { "times", ia.times },
               { "boundary", to_string(bundle.boundary()) } }
           .dump()
      << '\n';
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs
{
  std::string a;
  std::string b;
  std::string estimator = "auto";
  double grid_min = 1e-2;
  double grid_max = 1e2;
  std::size_t grid_count = 15;
  std::string model;
  unsigned threads = 0;
  std::string out;
  bool no_timings = false;
};

SnapshotSeries
read_snapshots(const fs::path& p)
{
  if (fs::is_regular_file(p))
    return SnapshotSeries({ Snapshot(0.0, read_csv_matrix(p)) });
  return read_snapshot_dir(p);
}

int
cmd_evaluate(const EvaluateArgs& a, std::ostream& out)
{
  const auto estimator = mmd_estimator_from_string(a.estimator);
  const auto grid = BandwidthGrid::log_spaced(a.grid_min, a.grid_max, a.grid_count);
  auto sa = read_snapshots(a.a);
  auto sb = read_snapshots(a.b);
  if (!a.model.empty()) {
    const auto file = load_model(a.model);
    sa = apply_rescaler(file.model.rescaler, sa);
    sb = apply_rescaler(file.model.rescaler, sb);
  }

  const auto start = Clock::now();
  const auto res = avg_gmmd2(sa, sb, grid, estimator, resolve_threads(a.threads));
  const double elapsed = seconds_since(start);

  json snaps = json::array();
  for (std::size_t j = 0; j < res.per_snapshot.size(); ++j)
    snaps.push_back({ { "time", res.times[j] },
                      { "gmmd2", res.per_snapshot[j].value },
                      { "sigma", res.per_snapshot[j].sigma },
                      { "estimator", to_string(res.per_snapshot[j].estimator) } });
  json report = { { "command", "evaluate" },
                  { "estimator", to_string(estimator) },
                  { "grid", grid.values() },
                  { "snapshots", std::move(snaps) },
                  { "average_gmmd2", res.average } };
  if (!a.no_timings)
    report["seconds"] = elapsed;

  const auto text = report.dump(2);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    f << text << '\n';
    if (!f)
      throw std::runtime_error("cannot write " + a.out);
  }
  out << text << '\n';
  return kExitOk;
}

} // namespace

int
run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Dynamic projection-pursuit Monge maps: simulate, train, "
                "sample, interpolate and evaluate" };
  app.name("dppmm");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate a benchmark SDE and write "
                                           "train/ and test/ snapshot sets");
  s->add_option("--system", sim.system, "vdp, ou or lorenz96")
    ->required()
    ->check(CLI::IsMember({ "vdp", "ou", "lorenz96" }));
  s->add_option("--d", sim.d, "dimension (default 2, or 4 for lorenz96)");
  s->add_option("--n", sim.n, "trajectories per set")->capture_default_str();
  s->add_option("--m", sim.m, "snapshots per set")->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--dt", sim.dt, "Euler-Maruyama step")->capture_default_str();
  s->add_option("--threads", sim.threads, "0 = all cores")->capture_default_str();
  s->add_option("--out", sim.out, "output directory")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "fit a model to a snapshot directory");
  t->add_option("--data", tr.data, "snapshot directory")->required();
  t->add_option("--out", tr.out, "model file (JSON)")->required();
  t->add_option("--alpha", tr.alpha, "relative W2 stopping tolerance")->capture_default_str();
  t->add_option("--bins", tr.bins, "KDE cells")->capture_default_str();
  t->add_option("--margin", tr.margin, "padding of the 1D map domain")->capture_default_str();
  t->add_option("--epsilon", tr.epsilon, "density floor")->capture_default_str();
  t->add_option("--bandwidth", tr.bandwidth, "scott, isj or fixed:<h>")->capture_default_str();
  t->add_option("--method", tr.method, "regularized or sorted")
    ->capture_default_str()
    ->check(CLI::IsMember({ "regularized", "sorted" }));
  t->add_option("--max-iter", tr.max_iter, "per-pair iteration cap (0 = 10 d)")->capture_default_str();
  t->add_option("--seed", tr.seed, "base sample seed")->capture_default_str();
  t->add_flag("--parallel", tr.parallel, "fit snapshot pairs concurrently");
  t->add_option("--threads", tr.threads, "0 = all cores")->capture_default_str();
  t->add_option("--keep-indices", tr.keep, "train on these snapshot positions only")
    ->delimiter(',');

  SampleArgs sa;
  auto* sp = app.add_subcommand("sample", "generate coupled samples at every "
                                          "model time");
  sp->add_option("--model", sa.model)->required();
  sp->add_option("--n", sa.n, "samples per snapshot")->capture_default_str();
  sp->add_option("--seed", sa.seed)->capture_default_str();
  sp->add_option("--out", sa.out, "output snapshot directory")->required();
  sp->add_flag("--keep-rescaled", sa.keep_rescaled, "write model-space units");
  sp->add_option("--threads", sa.threads, "0 = all cores")->capture_default_str();

  InterpolateArgs ia;
  auto* ip = app.add_subcommand("interpolate", "evaluate transport splines at "
                                               "intermediate times");
  ip->add_option("--model", ia.sample.model)->required();
  ip->add_option("--times", ia.times, "times in data units")
    ->required()
    ->delimiter(',');
  ip->add_option("--n", ia.sample.n, "trajectories")->capture_default_str();
  ip->add_option("--seed", ia.sample.seed)->capture_default_str();
  ip->add_option("--out", ia.sample.out, "output snapshot directory")->required();
  ip->add_flag("--keep-rescaled", ia.sample.keep_rescaled, "write model-space units");
  ip->add_option("--threads", ia.sample.threads, "0 = all cores")->capture_default_str();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "snapshot-averaged GMMD^2 between "
                                           "two snapshot sets");
  e->add_option("a", ev.a, "snapshot directory or CSV file")->required();
  e->add_option("b", ev.b, "snapshot directory or CSV file")->required();
  e->add_option("--estimator", ev.estimator, "auto, quadratic or linear")
    ->capture_default_str()
    ->check(CLI::IsMember({ "auto", "quadratic", "linear" }));
  e->add_option("--grid-min", ev.grid_min)->capture_default_str();
  e->add_option("--grid-max", ev.grid_max)->capture_default_str();
  e->add_option("--grid-count", ev.grid_count)->capture_default_str();
  e->add_option("--model", ev.model, "rescale both sets into this model's units");
  e->add_option("--threads", ev.threads, "0 = all cores")->capture_default_str();
  e->add_option("--out", ev.out, "also write the report here");
  e->add_flag("--no-timings", ev.no_timings, "omit wall times from the report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s)
      return cmd_simulate(sim, out);
    if (*t)
      return cmd_train(tr, out);
    if (*sp)
      return cmd_sample(sa, out);
    if (*ip)
      return cmd_interpolate(ia, out);
    if (*e)
      return cmd_evaluate(ev, out);
  } catch (const InvalidInput& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const OutOfRange& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int
run_cli(int argc, char** argv)
{
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

} // namespace dppmm
