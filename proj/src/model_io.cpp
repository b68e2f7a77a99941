#include "dppmm/model_io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace dppmm {

using nlohmann::json;

std::string
format_bandwidth_rule(const KdeConfig& kde)
{
  switch (kde.rule) {
    case BandwidthRule::scott:
      return "scott";
    case BandwidthRule::isj:
      return "isj";
    case BandwidthRule::fixed:
      return "fixed:" + json(kde.fixed_bandwidth).dump();
  }
  return "unknown";
}

void
parse_bandwidth_rule(std::string_view text, KdeConfig& kde)
{
  if (text == "scott") {
    kde.rule = BandwidthRule::scott;
    return;
  }
  if (text == "isj") {
    kde.rule = BandwidthRule::isj;
    return;
  }
  constexpr std::string_view prefix = "fixed:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto num = text.substr(prefix.size());
    double h = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), h);
    if (ec != std::errc() || ptr != num.data() + num.size() || !(h > 0.0) ||
        !std::isfinite(h))
      throw InvalidInput("fixed bandwidth '" + std::string(num) +
                         "' is not a positive number");
    kde.rule = BandwidthRule::fixed;
    kde.fixed_bandwidth = h;
    return;
  }
  throw InvalidInput("unknown bandwidth rule '" + std::string(text) +
                     "' (expected scott, isj or fixed:<h>)");
}

std::string_view
to_string(OneDimMethod m)
{
  return m == OneDimMethod::sorted ? "sorted" : "regularized";
}

OneDimMethod
one_dim_method_from_string(std::string_view s)
{
  if (s == "sorted")
    return OneDimMethod::sorted;
  if (s == "regularized")
    return OneDimMethod::regularized;
  throw InvalidInput("unknown 1D map method '" + std::string(s) + "'");
}

namespace {

json
to_json_vector(const Vector& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

json
map1d_to_json(const Map1D& map)
{
  if (const auto* s = std::get_if<SortedQuantileMap>(&map))
    return { { "type", "sorted" },
             { "knots_x", s->knots_x },
             { "knots_y", s->knots_y } };
  const auto& r = std::get<RegularizedMap>(map);
  return { { "type", "regularized" },
           { "lo", r.lo },
           { "hi", r.hi },
           { "z", r.z },
           { "cdf_source", r.cdf_source },
           { "cdf_target", r.cdf_target } };
}

json
config_to_json(const PpmmConfig& c)
{
  return { { "alpha", c.alpha },
           { "max_iter", c.max_iter },
           { "method", to_string(c.method) },
           { "ridge", c.ridge },
           { "bins", c.kde.bins },
           { "margin", c.kde.margin },
           { "epsilon", c.kde.floor },
           { "bandwidth", format_bandwidth_rule(c.kde) },
           { "isj_grid", c.kde.isj_grid } };
}

json
report_to_json(const PpmmFitReport& r)
{
  return { { "k_final", r.k_final },
           { "stop_reason", to_string(r.stop_reason) },
           { "w2_history", r.w2_history } };
}

// --- reading --------------------------------------------------------------

// Wraps nlohmann lookups so that errors carry the JSON path.
const json&
field(const json& obj, const char* key, const std::string& where)
{
  if (!obj.is_object())
    throw InvalidInput(where + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end())
    throw InvalidInput(where + " is missing '" + key + "'");
  return *it;
}

template<typename T>
T
get_as(const json& j, const std::string& where)
{
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(where + ": " + e.what());
  }
}

Vector
read_vector(const json& j, const std::string& where)
{
  const auto v = get_as<std::vector<double>>(j, where);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Map1D
map1d_from_json(const json& j, const std::string& where)
{
  const auto type = get_as<std::string>(field(j, "type", where), where + ".type");
  if (type == "sorted") {
    SortedQuantileMap m;
    m.knots_x = get_as<std::vector<double>>(field(j, "knots_x", where),
                                            where + ".knots_x");
    m.knots_y = get_as<std::vector<double>>(field(j, "knots_y", where),
                                            where + ".knots_y");
    return m;
  }
  if (type == "regularized") {
    RegularizedMap m;
    m.lo = get_as<double>(field(j, "lo", where), where + ".lo");
    m.hi = get_as<double>(field(j, "hi", where), where + ".hi");
    m.z = get_as<std::vector<double>>(field(j, "z", where), where + ".z");
    m.cdf_source = get_as<std::vector<double>>(field(j, "cdf_source", where),
                                               where + ".cdf_source");
    m.cdf_target = get_as<std::vector<double>>(field(j, "cdf_target", where),
                                               where + ".cdf_target");
    return m;
  }
  throw InvalidInput(where + ".type: unknown 1D map type '" + type + "'");
}

PpmmConfig
config_from_json(const json& j, const std::string& where)
{
  PpmmConfig c;
  c.alpha = get_as<double>(field(j, "alpha", where), where + ".alpha");
  c.max_iter = get_as<std::size_t>(field(j, "max_iter", where), where + ".max_iter");
  c.method = one_dim_method_from_string(
    get_as<std::string>(field(j, "method", where), where + ".method"));
  c.ridge = get_as<double>(field(j, "ridge", where), where + ".ridge");
  c.kde.bins = get_as<std::size_t>(field(j, "bins", where), where + ".bins");
  c.kde.margin = get_as<double>(field(j, "margin", where), where + ".margin");
  c.kde.floor = get_as<double>(field(j, "epsilon", where), where + ".epsilon");
  parse_bandwidth_rule(
    get_as<std::string>(field(j, "bandwidth", where), where + ".bandwidth"),
    c.kde);
  c.kde.isj_grid =
    get_as<std::size_t>(field(j, "isj_grid", where), where + ".isj_grid");
  c.kde.validate();
  return c;
}

PpmmFitReport
report_from_json(const json& j, const std::string& where)
{
  PpmmFitReport r;
  r.k_final = get_as<std::size_t>(field(j, "k_final", where), where + ".k_final");
  r.stop_reason = stop_reason_from_string(
    get_as<std::string>(field(j, "stop_reason", where), where + ".stop_reason"));
  r.w2_history = get_as<std::vector<double>>(field(j, "w2_history", where),
                                             where + ".w2_history");
  return r;
}

} // namespace

std::string
model_to_json(const ModelFile& file)
{
  const auto& m = file.model;
  const auto& p = file.provenance;

  json maps = json::array();
  for (const auto& map : m.maps) {
    json steps = json::array();
    for (const auto& step : map.steps())
      steps.push_back({ { "direction", to_json_vector(step.direction.components()) },
                        { "map1d", map1d_to_json(step.map) } });
    maps.push_back({ { "steps", std::move(steps) } });
  }

  json reports = json::array();
  for (const auto& r : p.reports)
    reports.push_back(report_to_json(r));

  json doc = {
    { "schema_version", kModelSchemaVersion },
    { "rescaler",
      { { "shift", to_json_vector(m.rescaler.shift) },
        { "scale", to_json_vector(m.rescaler.scale) },
        { "time_origin", m.rescaler.time_origin },
        { "time_span", m.rescaler.time_span } } },
    { "base",
      { { "mean", to_json_vector(m.base_mean) },
        { "variance", to_json_vector(m.base_var) } } },
    { "times", m.times },
    { "maps", std::move(maps) },
    { "provenance",
      { { "seed", p.seed },
        { "config", config_to_json(p.ppmm) },
        { "snapshot_indices", p.snapshot_indices },
        { "reports", std::move(reports) } } },
  };
  return doc.dump(1);
}

ModelFile
model_from_json(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("model file is not valid JSON: ") + e.what());
  }
  const std::string root = "model";
  const int version =
    get_as<int>(field(doc, "schema_version", root), "schema_version");
  if (version != kModelSchemaVersion)
    throw InvalidInput("unsupported model schema_version " +
                       std::to_string(version) + " (expected " +
                       std::to_string(kModelSchemaVersion) + ")");

  ModelFile out;
  auto& m = out.model;
  const auto& r = field(doc, "rescaler", root);
  m.rescaler.shift = read_vector(field(r, "shift", "rescaler"), "rescaler.shift");
  m.rescaler.scale = read_vector(field(r, "scale", "rescaler"), "rescaler.scale");
  m.rescaler.time_origin =
    get_as<double>(field(r, "time_origin", "rescaler"), "rescaler.time_origin");
  m.rescaler.time_span =
    get_as<double>(field(r, "time_span", "rescaler"), "rescaler.time_span");

  const auto& b = field(doc, "base", root);
  m.base_mean = read_vector(field(b, "mean", "base"), "base.mean");
  m.base_var = read_vector(field(b, "variance", "base"), "base.variance");
  m.times = get_as<std::vector<double>>(field(doc, "times", root), "times");

  const auto& maps = field(doc, "maps", root);
  if (!maps.is_array())
    throw InvalidInput("maps must be an array");
  const auto d = m.base_mean.size();
  if (d < 1)
    throw InvalidInput("base.mean must not be empty");
  for (std::size_t j = 0; j < maps.size(); ++j) {
    const std::string where = "maps[" + std::to_string(j) + "]";
    const auto& steps = field(maps[j], "steps", where);
    if (!steps.is_array())
      throw InvalidInput(where + ".steps must be an array");
    PpmmMap map(d);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::string sw = where + ".steps[" + std::to_string(k) + "]";
      Vector dir = read_vector(field(steps[k], "direction", sw), sw + ".direction");
      if (dir.size() != d)
        throw InvalidInput(sw + ".direction has dimension " +
                           std::to_string(dir.size()) + ", expected " +
                           std::to_string(d));
      Direction direction = [&] {
        try {
          return Direction::from_unit(std::move(dir));
        } catch (const InvalidInput& e) {
          throw InvalidInput(sw + ".direction: " + e.what());
        }
      }();
      Map1D map1d = map1d_from_json(field(steps[k], "map1d", sw), sw + ".map1d");
      try {
        validate_map(map1d);
      } catch (const InvalidInput& e) {
        throw InvalidInput(sw + ".map1d: " + e.what());
      }
      map.push_back(PpmmStep{ std::move(direction), std::move(map1d) });
    }
    m.maps.push_back(std::move(map));
  }

  const auto& p = field(doc, "provenance", root);
  auto& prov = out.provenance;
  prov.seed = get_as<std::uint64_t>(field(p, "seed", "provenance"), "provenance.seed");
  prov.ppmm = config_from_json(field(p, "config", "provenance"), "provenance.config");
  prov.snapshot_indices = get_as<std::vector<std::size_t>>(
    field(p, "snapshot_indices", "provenance"), "provenance.snapshot_indices");
  const auto& reports = field(p, "reports", "provenance");
  if (!reports.is_array())
    throw InvalidInput("provenance.reports must be an array");
  for (std::size_t j = 0; j < reports.size(); ++j)
    prov.reports.push_back(report_from_json(
      reports[j], "provenance.reports[" + std::to_string(j) + "]"));

  m.validate();
  if (prov.reports.size() != m.maps.size())
    throw InvalidInput("provenance.reports needs one entry per map");
  if (prov.snapshot_indices.size() != m.maps.size())
    throw InvalidInput("provenance.snapshot_indices needs one entry per map");
  return out;
}

void
save_model(const std::filesystem::path& path, const ModelFile& file)
{
  file.model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << model_to_json(file) << '\n';
  if (!out)
    throw std::runtime_error("failed writing '" + path.string() + "'");
}

ModelFile
load_model(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InvalidInput("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return model_from_json(buf.str());
  } catch (const InvalidInput& e) {
    throw InvalidInput("model file '" + path.string() + "': " + e.what());
  }
}

} // namespace dppmm
