#include "tpd/explain.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

std::string flag_name(BandFlag flag, const PercentileBands& bands) {
  switch (flag) {
    case BandFlag::BelowLower:
      return fmt::format("below{}", bands.lower_level);
    case BandFlag::BetweenBands:
      return fmt::format("{}to{}", bands.lower_level, bands.upper_level);
    case BandFlag::AboveUpper:
      return fmt::format("above{}", bands.upper_level);
  }
  return "unknown";
}

PercentileBands fit_bands(std::span<const double> scores_row_major, std::size_t dims,
                          double lower_level, double upper_level) {
  if (dims == 0 || scores_row_major.empty()) {
    fail(ErrorKind::InvalidInput, "cannot fit bands on empty scores");
  }
  if (scores_row_major.size() % dims != 0) {
    fail(ErrorKind::InvalidInput, "score matrix size is not a multiple of the dimension count");
  }
  if (!(lower_level >= 0.0 && lower_level <= upper_level && upper_level <= 100.0)) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("percentile levels {} / {} must satisfy 0 <= lower <= upper <= 100",
                     lower_level, upper_level));
  }
  const std::size_t n = scores_row_major.size() / dims;
  PercentileBands bands;
  bands.lower_level = lower_level;
  bands.upper_level = upper_level;
  bands.lower.resize(dims);
  bands.upper.resize(dims);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < dims; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = scores_row_major[i * dims + j];
    bands.lower[j] = nearest_rank_quantile(column, lower_level / 100.0);
    bands.upper[j] = nearest_rank_quantile(column, upper_level / 100.0);
  }
  return bands;
}

PercentileBands fit_bands(const ScoreTable& training_scores, double lower_level,
                          double upper_level) {
  if (training_scores.rows() == 0) fail(ErrorKind::InvalidInput, "cannot fit bands on no rows");
  const std::size_t d = training_scores.dims();
  std::vector<double> flat(training_scores.rows() * d);
  for (std::size_t i = 0; i < training_scores.rows(); ++i) {
    const auto row = training_scores.per_dim(i);
    std::copy(row.begin(), row.end(), flat.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return fit_bands(flat, d, lower_level, upper_level);
}

Explanation explain_sample(std::size_t sample, std::span<const double> per_dim,
                           const PercentileBands& bands, Label verdict) {
  if (per_dim.size() != bands.dimensions()) {
    fail(ErrorKind::SchemaMismatch,
         fmt::format("{} dimensional scores against {} bands", per_dim.size(),
                     bands.dimensions()));
  }
  Explanation e;
  e.sample = sample;
  e.verdict = verdict;
  e.scores.assign(per_dim.begin(), per_dim.end());
  e.flags.reserve(per_dim.size());
  for (std::size_t j = 0; j < per_dim.size(); ++j) {
    if (per_dim[j] >= bands.upper[j]) {
      e.flags.push_back(BandFlag::AboveUpper);
      e.above_upper.push_back(j);
    } else if (per_dim[j] >= bands.lower[j]) {
      e.flags.push_back(BandFlag::BetweenBands);
    } else {
      e.flags.push_back(BandFlag::BelowLower);
    }
  }
  std::stable_sort(e.above_upper.begin(), e.above_upper.end(),
                   [&](std::size_t a, std::size_t b) { return per_dim[a] > per_dim[b]; });
  return e;
}

std::string Explanation::narrative(std::span<const std::string> names) const {
  if (above_upper.empty()) return "normal: no dimension reaches its upper band";
  std::vector<std::string> listed;
  listed.reserve(above_upper.size());
  for (auto j : above_upper) {
    listed.push_back(j < names.size() ? names[j] : fmt::format("{}", j));
  }
  return fmt::format("{} dimension(s) at or above the upper band: {}", above_upper.size(),
                     fmt::join(listed, ", "));
}

}  // namespace tpd
