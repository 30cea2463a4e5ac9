#include "tpd/ecod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

EcodModel fit_ecod(const DataMatrix& x) {
  if (x.rows() < 2) {
    fail(ErrorKind::InvalidInput, fmt::format("need at least 2 rows, got {}", x.rows()));
  }
  if (x.cols() == 0) fail(ErrorKind::InvalidInput, "need at least one column");
  return EcodModel{fit_dimensions(x), x.names()};
}

ScoreTable score_ecod(const EcodModel& model, const DataMatrix& x) {
  return score_tail_aggregates(model.dims, x);
}

NoiseFilterResult filter_noise(const DataMatrix& x, double contamination) {
  validate_contamination(contamination);
  NoiseFilterResult result;
  result.model = fit_ecod(x);
  result.scores = score_ecod(result.model, x);

  const std::size_t n = x.rows();
  const auto k = static_cast<std::size_t>(std::floor(contamination * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto totals = result.scores.totals();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });

  result.removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(result.removed.begin(), result.removed.end());
  result.threshold = k < n ? totals[order[k]] : totals[order[n - 1]];

  std::vector<std::size_t> kept;
  kept.reserve(n - k);
  auto rm = result.removed.begin();
  for (std::size_t i = 0; i < n; ++i) {
    if (rm != result.removed.end() && *rm == i) {
      ++rm;
      continue;
    }
    kept.push_back(i);
  }
  result.clean = x.select_rows(kept);
  return result;
}

}  // namespace tpd
