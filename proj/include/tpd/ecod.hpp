#pragma once

#include <cstddef>
#include <vector>

#include "tpd/data_matrix.hpp"
#include "tpd/ecdf.hpp"
#include "tpd/scores.hpp"

namespace tpd {

/// Empirical-CDF outlier detector used to clean training data before the
/// copula detectors are fitted.
struct EcodModel {
  std::vector<FittedDimension> dims;
  std::vector<std::string> names;

  std::size_t dimensions() const noexcept { return dims.size(); }
};

/// Requires n >= 2 rows of finite values.
EcodModel fit_ecod(const DataMatrix& x);

ScoreTable score_ecod(const EcodModel& model, const DataMatrix& x);

struct NoiseFilterResult {
  DataMatrix clean;                  // kept rows, original order
  std::vector<std::size_t> removed;  // ascending row indices
  ScoreTable scores;                 // scores of every input row
  EcodModel model;
  /// Largest kept score, i.e. the nearest-rank (1 - contamination) quantile
  /// of the training scores. Every removed row scores at least this much.
  double threshold = 0.0;
};

/// Removes the floor(contamination * n) highest-scoring rows. Ties on the
/// score remove the lower row index first.
NoiseFilterResult filter_noise(const DataMatrix& x, double contamination);

}  // namespace tpd
