#pragma once

#include <span>
#include <vector>

#include "tpd/data_matrix.hpp"
#include "tpd/ecdf.hpp"
#include "tpd/scores.hpp"

namespace tpd {

/// Empirical-copula detector. The copula observations of a sample are its
/// per-dimension left and right ECDF values; the score is the largest of the
/// negative-log sums over the left observations, the right observations and
/// the skewness-corrected observations (left when skewness < 0, else right).
///
/// `threshold` is the nearest-rank (1 - contamination) quantile of the
/// model's own training scores; samples scoring strictly above it are
/// labelled anomalous.
struct CopodModel {
  std::vector<FittedDimension> dims;
  double threshold = 0.0;
  double contamination = 0.0;

  std::size_t dimensions() const noexcept { return dims.size(); }
};

CopodModel fit_copod(const DataMatrix& x, double contamination);

ScoreTable score_copod(const CopodModel& model, const DataMatrix& x);

/// -1 iff score > threshold.
std::vector<Label> labels_from_scores(const CopodModel& model, std::span<const double> totals);

std::vector<Label> predict_labels(const CopodModel& model, const DataMatrix& x);

}  // namespace tpd
