#include "tpd/scores.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

namespace {

// 0.0 - log(1) is +0, so a certain event never prints as "-0".
inline double neg_log(double p) { return 0.0 - std::log(p); }

}  // namespace

ScoreTable::ScoreTable(std::size_t rows, std::size_t dims)
    : dims_(dims),
      totals_(rows, 0.0),
      components_(rows),
      winners_(rows, Aggregate::SkewCorrected),
      per_dim_(rows * dims, 0.0) {}

std::vector<double> ScoreTable::dimension_scores(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = per_dim_[i * dims_ + j];
  return out;
}

ScoredSample ScoreTable::sample(std::size_t i) const {
  const auto dims = per_dim(i);
  return ScoredSample{totals_[i], components_[i], winners_[i],
                      std::vector<double>(dims.begin(), dims.end())};
}

ScoreTable score_tail_aggregates(std::span<const FittedDimension> dims, const DataMatrix& x) {
  const std::size_t d = dims.size();
  if (x.cols() != d) {
    fail(ErrorKind::SchemaMismatch,
         fmt::format("matrix has {} columns, model expects {}", x.cols(), d));
  }
  const std::size_t n = x.rows();
  ScoreTable table(n, d);

  // Left-tail terms go straight into the per-dimension buffer; right-tail
  // terms live in a scratch matrix until each row's winner is known.
  std::vector<double> right_terms(n * d);
  std::vector<double> left_p(n);
  std::vector<double> right_p(n);
  for (std::size_t j = 0; j < d; ++j) {
    dims[j].eval_tails(x.column(j), left_p, right_p);
    for (std::size_t i = 0; i < n; ++i) {
      table.per_dim_[i * d + j] = neg_log(left_p[i]);
      right_terms[i * d + j] = neg_log(right_p[i]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    double* row_left = table.per_dim_.data() + i * d;
    const double* row_right = right_terms.data() + i * d;
    TailComponents c;
    for (std::size_t j = 0; j < d; ++j) {
      c.left += row_left[j];
      c.right += row_right[j];
      c.skew_corrected += dims[j].prefers_left_tail() ? row_left[j] : row_right[j];
    }
    const double total = std::max({c.left, c.right, c.skew_corrected});
    Aggregate winner = Aggregate::SkewCorrected;
    if (c.skew_corrected != total) winner = (c.left == total) ? Aggregate::Left : Aggregate::Right;

    if (winner == Aggregate::Right) {
      std::copy(row_right, row_right + d, row_left);
    } else if (winner == Aggregate::SkewCorrected) {
      for (std::size_t j = 0; j < d; ++j) {
        if (!dims[j].prefers_left_tail()) row_left[j] = row_right[j];
      }
    }
    table.totals_[i] = total;
    table.components_[i] = c;
    table.winners_[i] = winner;
  }
  return table;
}

std::vector<FittedDimension> fit_dimensions(const DataMatrix& x) {
  std::vector<FittedDimension> dims;
  dims.reserve(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    try {
      dims.push_back(fit_dimension(x.column(j)));
    } catch (const Error& e) {
      fail(e.kind(), fmt::format("column '{}': {}", x.name(j), e.what()));
    }
  }
  return dims;
}

double nearest_rank_quantile(std::span<const double> values, double q) {
  if (values.empty()) fail(ErrorKind::InvalidInput, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) {
    fail(ErrorKind::InvalidInput, fmt::format("quantile level {} outside [0, 1]", q));
  }
  const std::size_t n = values.size();
  // The small slack keeps products like 0.8 * 5 from rounding up a rank.
  const double raw = std::ceil(q * static_cast<double>(n) - 1e-9);
  const std::size_t rank = std::clamp<std::size_t>(
      raw < 1.0 ? 1 : static_cast<std::size_t>(raw), 1, n);
  std::vector<double> tmp(values.begin(), values.end());
  auto nth = tmp.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(tmp.begin(), nth, tmp.end());
  return *nth;
}

void validate_contamination(double contamination) {
  if (!(contamination >= 0.0 && contamination <= 0.5)) {
    fail(ErrorKind::InvalidConfig,
         fmt::format("contamination {} outside [0, 0.5]", contamination));
  }
}

}  // namespace tpd
