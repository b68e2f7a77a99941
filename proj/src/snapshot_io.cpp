#include "dppmm/snapshot_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dppmm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string
format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix
read_csv_matrix(const fs::path& file)
{
  std::ifstream in(file);
  if (!in)
    throw InvalidInput("cannot open " + file.string());

  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    Eigen::Index count = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && *p == ' ')
        ++p;
      double v;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || !std::isfinite(v))
        throw InvalidInput(file.string() + ":" + std::to_string(lineno) +
                           ": expected a finite number");
      values.push_back(v);
      ++count;
      p = next;
      while (p < end && *p == ' ')
        ++p;
      if (p < end) {
        if (*p != ',')
          throw InvalidInput(file.string() + ":" + std::to_string(lineno) +
                             ": expected ','");
        ++p;
      }
    }
    if (cols < 0)
      cols = count;
    else if (count != cols)
      throw InvalidInput(file.string() + ":" + std::to_string(lineno) +
                         ": inconsistent column count");
    ++rows;
  }
  if (rows == 0)
    throw InvalidInput(file.string() + " contains no samples");

  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = values[static_cast<std::size_t>(i * cols + k)];
  return m;
}

void
write_csv_matrix(const fs::path& file, const Matrix& m)
{
  std::ofstream out(file, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + file.string());
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k > 0)
        line += ',';
      line += format_double(m(i, k));
    }
    line += '\n';
    out << line;
  }
  if (!out)
    throw std::runtime_error("write failed for " + file.string());
}

SnapshotSeries
read_snapshot_dir(const fs::path& dir)
{
  std::ifstream in(dir / "manifest.json");
  if (!in)
    throw InvalidInput("missing manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("malformed manifest.json: " + std::string(e.what()));
  }

  if (!manifest.contains("d") || !manifest.contains("snapshots") ||
      !manifest["snapshots"].is_array())
    throw InvalidInput("manifest.json needs keys \"d\" and \"snapshots\"");
  Eigen::Index d = 0;
  std::vector<std::pair<double, std::string>> listed;
  try {
    d = manifest["d"].get<Eigen::Index>();
    for (const auto& entry : manifest["snapshots"])
      listed.emplace_back(entry.at("time").get<double>(),
                          entry.at("file").get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidInput("malformed manifest.json: " + std::string(e.what()));
  }

  std::vector<Snapshot> snaps;
  for (std::size_t j = 0; j < listed.size(); ++j) {
    const auto& [time, file] = listed[j];
    const auto& entry = manifest["snapshots"][j];
    Matrix m = read_csv_matrix(dir / file);
    if (m.cols() != d)
      throw InvalidInput(file + " has " + std::to_string(m.cols()) +
                         " columns, manifest says d = " + std::to_string(d));
    if (entry.contains("n") && entry["n"].is_number_integer() &&
        entry["n"].get<Eigen::Index>() != m.rows())
      throw InvalidInput(file + " row count disagrees with manifest n");
    snaps.emplace_back(time, std::move(m));
  }
  return SnapshotSeries(std::move(snaps));
}

void
write_snapshot_dir(const fs::path& dir, const SnapshotSeries& series)
{
  fs::create_directories(dir);
  json entries = json::array();
  for (std::size_t j = 0; j < series.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", j);
    write_csv_matrix(dir / name, series[j].samples());
    entries.push_back({ { "time", series[j].time() },
                        { "file", name },
                        { "n", series[j].size() } });
  }
  json manifest = { { "d", series.dim() }, { "snapshots", entries } };
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

} // namespace dppmm
