#include "tpd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "config_json.hpp"
#include "tpd/error.hpp"

namespace tpd {

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::Discrete ? "discrete" : "continuous";
}

std::string_view to_string(CombinerMode mode) { return mode == CombinerMode::Or ? "or" : "and"; }

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "discrete") return FeatureKind::Discrete;
  if (text == "continuous") return FeatureKind::Continuous;
  fail(ErrorKind::InvalidConfig, fmt::format("unknown feature kind '{}'", text));
}

CombinerMode parse_combiner(std::string_view text) {
  if (text == "or" || text == "OR") return CombinerMode::Or;
  if (text == "and" || text == "AND") return CombinerMode::And;
  fail(ErrorKind::InvalidConfig, fmt::format("unknown combiner '{}' (expected or/and)", text));
}

void WindowConfig::validate() const {
  if (length < 1) fail(ErrorKind::InvalidConfig, "window length must be at least 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    fail(ErrorKind::InvalidConfig, fmt::format("window ratio {} outside (0, 1]", ratio));
  }
}

void RunConfig::validate() const {
  if (!(contamination >= 0.0 && contamination <= 0.5)) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("contamination {} outside [0, 0.5]", contamination));
  }
  if (discrete_cardinality_limit < 2) {
    fail(ErrorKind::InvalidConfig, "discrete cardinality limit must be at least 2");
  }
  window.validate();
  if (!(sampling_rate_hz > 0.0) || !std::isfinite(sampling_rate_hz)) {
    fail(ErrorKind::InvalidConfig, "sampling rate must be positive");
  }
  if (!(lower_percentile >= 0.0 && lower_percentile <= upper_percentile &&
        upper_percentile <= 100.0)) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("percentile levels {} / {} must satisfy 0 <= lower <= upper <= 100",
                     lower_percentile, upper_percentile));
  }
}

namespace detail {

nlohmann::json config_to_json_value(const RunConfig& c) {
  nlohmann::json j;
  j["contamination"] = c.contamination;
  j["discrete_cardinality_limit"] = c.discrete_cardinality_limit;
  j["combiner"] = std::string(to_string(c.combiner));
  j["window_length"] = c.window.length;
  j["window_ratio"] = c.window.ratio;
  j["sampling_rate_hz"] = c.sampling_rate_hz;
  j["percentiles"] = {c.lower_percentile, c.upper_percentile};
  j["label_column"] = c.label_column ? nlohmann::json(*c.label_column) : nlohmann::json();
  j["index_column"] = c.index_column ? nlohmann::json(*c.index_column) : nlohmann::json();
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [name, kind] : c.kind_overrides) overrides[name] = std::string(to_string(kind));
  j["overrides"] = overrides;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json_value(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "contamination", "discrete_cardinality_limit", "combiner",     "window_length",
      "window_ratio",  "sampling_rate_hz",           "percentiles",  "label_column",
      "index_column",  "overrides",                  "seed"};
  if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      fail(ErrorKind::InvalidConfig, fmt::format("unknown config key '{}'", item.key()));
    }
  }
  RunConfig c;
  try {
    if (j.contains("contamination")) c.contamination = j.at("contamination").get<double>();
    if (j.contains("discrete_cardinality_limit")) {
      c.discrete_cardinality_limit = j.at("discrete_cardinality_limit").get<std::size_t>();
    }
    if (j.contains("combiner")) c.combiner = parse_combiner(j.at("combiner").get<std::string>());
    if (j.contains("window_length")) c.window.length = j.at("window_length").get<std::size_t>();
    if (j.contains("window_ratio")) c.window.ratio = j.at("window_ratio").get<double>();
    if (j.contains("sampling_rate_hz")) c.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
    if (j.contains("percentiles")) {
      const auto& p = j.at("percentiles");
      if (!p.is_array() || p.size() != 2) {
        fail(ErrorKind::InvalidConfig, "percentiles must be a two-element array");
      }
      c.lower_percentile = p[0].get<double>();
      c.upper_percentile = p[1].get<double>();
    }
    if (j.contains("label_column") && !j.at("label_column").is_null()) {
      c.label_column = j.at("label_column").get<std::string>();
    }
    if (j.contains("index_column") && !j.at("index_column").is_null()) {
      c.index_column = j.at("index_column").get<std::string>();
    }
    if (j.contains("overrides")) {
      for (const auto& item : j.at("overrides").items()) {
        c.kind_overrides[item.key()] = parse_feature_kind(item.value().get<std::string>());
      }
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

}  // namespace detail

std::string config_to_json(const RunConfig& config) {
  return detail::config_to_json_value(config).dump(2);
}

RunConfig config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, e.what());
  }
  return detail::config_from_json_value(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidConfig, fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace tpd
