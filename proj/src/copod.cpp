#include "tpd/copod.hpp"

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

CopodModel fit_copod(const DataMatrix& x, double contamination) {
  validate_contamination(contamination);
  if (x.rows() < 2) {
    fail(ErrorKind::InvalidInput, fmt::format("need at least 2 rows, got {}", x.rows()));
  }
  if (x.cols() == 0) fail(ErrorKind::InvalidInput, "need at least one column");

  CopodModel model;
  model.dims = fit_dimensions(x);
  model.contamination = contamination;
  const ScoreTable train = score_copod(model, x);
  model.threshold = nearest_rank_quantile(train.totals(), 1.0 - contamination);
  return model;
}

ScoreTable score_copod(const CopodModel& model, const DataMatrix& x) {
  return score_tail_aggregates(model.dims, x);
}

std::vector<Label> labels_from_scores(const CopodModel& model, std::span<const double> totals) {
  std::vector<Label> labels(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    labels[i] = totals[i] > model.threshold ? Label::Anomaly : Label::Normal;
  }
  return labels;
}

std::vector<Label> predict_labels(const CopodModel& model, const DataMatrix& x) {
  return labels_from_scores(model, score_copod(model, x).totals());
}

}  // namespace tpd
