#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpd/data_matrix.hpp"
#include "tpd/scores.hpp"

namespace tpd {

/// Per-dimension score bands taken from training-time dimensional scores.
/// With the default levels these are the 90th and 99th percentile bands.
struct PercentileBands {
  double lower_level = 90.0;
  double upper_level = 99.0;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimensions() const noexcept { return lower.size(); }
};

enum class BandFlag { BelowLower, BetweenBands, AboveUpper };

/// "below90", "90to99" or "above99" for the default levels.
std::string flag_name(BandFlag flag, const PercentileBands& bands);

/// Nearest-rank percentile of each dimension's training scores. Levels are
/// percentages with 0 <= lower <= upper <= 100.
PercentileBands fit_bands(const ScoreTable& training_scores, double lower_level = 90.0,
                          double upper_level = 99.0);

/// Same, from an explicit row-major n x d score matrix.
PercentileBands fit_bands(std::span<const double> scores_row_major, std::size_t dims,
                          double lower_level = 90.0, double upper_level = 99.0);

struct Explanation {
  std::size_t sample = 0;
  std::vector<double> scores;
  std::vector<BandFlag> flags;
  Label verdict = Label::Normal;
  /// Dimensions at or above their upper band, highest score first.
  std::vector<std::size_t> above_upper;

  std::string narrative(std::span<const std::string> names) const;
};

/// A score equal to a band counts as reaching it. Throws SchemaMismatch when
/// the score vector and the bands disagree on the dimension count.
Explanation explain_sample(std::size_t sample, std::span<const double> per_dim,
                           const PercentileBands& bands, Label verdict);

}  // namespace tpd
