#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace tpd {

enum class FeatureKind { Discrete, Continuous };

/// How the two detector labels combine into the per-sample decision O.
/// Or: anomalous when either detector flags the sample. And: only when both do.
enum class CombinerMode { Or, And };

std::string_view to_string(FeatureKind kind);
std::string_view to_string(CombinerMode mode);
FeatureKind parse_feature_kind(std::string_view text);
CombinerMode parse_combiner(std::string_view text);

/// Trailing decision window. `length` is counted in samples; the sampling rate
/// in RunConfig only documents what that means in seconds.
struct WindowConfig {
  std::size_t length = 30;
  double ratio = 0.8;

  void validate() const;

  bool operator==(const WindowConfig&) const = default;
};

struct RunConfig {
  double contamination = 0.10;
  std::size_t discrete_cardinality_limit = 10;
  CombinerMode combiner = CombinerMode::Or;
  WindowConfig window;
  double sampling_rate_hz = 1.0;
  double lower_percentile = 90.0;
  double upper_percentile = 99.0;
  std::optional<std::string> label_column;
  std::optional<std::string> index_column;
  std::map<std::string, FeatureKind> kind_overrides;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

std::string config_to_json(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys and bad values throw
/// InvalidConfig.
RunConfig config_from_json(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace tpd
