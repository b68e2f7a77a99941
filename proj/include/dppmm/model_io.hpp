#pragma once

#include "dppmm/dynamic.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dppmm {

inline constexpr int kModelSchemaVersion = 1;

//! "scott", "isj" or "fixed:<h>"
std::string format_bandwidth_rule(const KdeConfig& kde);
//! Sets rule and fixed_bandwidth of `kde` from a rule string.
void parse_bandwidth_rule(std::string_view text, KdeConfig& kde);

std::string_view to_string(OneDimMethod m);
OneDimMethod one_dim_method_from_string(std::string_view s);

//! How a model was trained. Scheduling options (threads, parallel) are not
//! recorded, so a model file does not depend on them.
struct Provenance
{
  std::uint64_t seed = 0;
  PpmmConfig ppmm;
  std::vector<std::size_t> snapshot_indices; //!< positions used for training
  std::vector<PpmmFitReport> reports;
};

struct ModelFile
{
  DppmmModel model;
  Provenance provenance;
};

//! Serialises to the JSON document (no trailing newline).
std::string model_to_json(const ModelFile& file);
//! Parses and validates; errors name the offending field.
ModelFile model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

} // namespace dppmm
