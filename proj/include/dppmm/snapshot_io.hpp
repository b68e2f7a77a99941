#pragma once

#include "dppmm/core.hpp"

#include <filesystem>
#include <string>

namespace dppmm {

// Snapshot directory layout:
//
//   <dir>/manifest.json   {"d": 2, "snapshots": [{"time": 0.0,
//                          "file": "snapshot_000.csv", "n": 10000}, ...]}
//   <dir>/snapshot_000.csv  one sample per line, d comma-separated values
//
// Numbers are written with 17 significant digits, so a write/read cycle is
// lossless.

Matrix read_csv_matrix(const std::filesystem::path& file);
void write_csv_matrix(const std::filesystem::path& file, const Matrix& m);

SnapshotSeries read_snapshot_dir(const std::filesystem::path& dir);
void write_snapshot_dir(const std::filesystem::path& dir,
                        const SnapshotSeries& series);

//! Formats a double with 17 significant digits (shortest lossless form).
std::string format_double(double v);

} // namespace dppmm
