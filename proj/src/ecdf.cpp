#include "tpd/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

namespace {

void require_finite_query(double z) {
  if (!std::isfinite(z)) fail(ErrorKind::InvalidInput, "non-finite query value");
}

}  // namespace

double sample_skewness(std::span<const double> column) {
  const std::size_t n = column.size();
  if (n < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  if (*lo == *hi) return 0.0;

  double sum = 0.0;
  for (double x : column) sum += x;
  const double mean = sum / static_cast<double>(n);

  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : column) {
    const double dev = x - mean;
    const double dev2 = dev * dev;
    m2 += dev2;
    m3 += dev2 * dev;
  }
  const double denom_n = static_cast<double>(n - 1);
  const double sigma = std::sqrt(m2 / denom_n);
  if (!(sigma > 0.0)) return 0.0;
  const double skew = m3 / (denom_n * sigma * sigma * sigma);
  if (!std::isfinite(skew) || std::fabs(skew) < kSkewnessZeroTolerance) return 0.0;
  return skew;
}

FittedDimension fit_dimension(std::span<const double> column) {
  if (column.empty()) fail(ErrorKind::InvalidInput, "cannot fit an empty column");
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!std::isfinite(column[i])) {
      fail(ErrorKind::InvalidInput, fmt::format("non-finite value at row {}", i));
    }
  }
  FittedDimension dim;
  dim.sorted_.assign(column.begin(), column.end());
  std::sort(dim.sorted_.begin(), dim.sorted_.end());
  // Skewness from the sorted copy so the result is independent of row order.
  dim.skewness_ = sample_skewness(dim.sorted_);
  return dim;
}

FittedDimension FittedDimension::from_parts(std::vector<double> sorted_values, double skewness) {
  if (sorted_values.empty()) fail(ErrorKind::InvalidInput, "fitted dimension has no values");
  if (!std::isfinite(skewness)) fail(ErrorKind::InvalidInput, "non-finite skewness");
  for (std::size_t i = 0; i < sorted_values.size(); ++i) {
    if (!std::isfinite(sorted_values[i]) || (i > 0 && sorted_values[i] < sorted_values[i - 1])) {
      fail(ErrorKind::InvalidInput,
           fmt::format("fitted values not finite and ascending at position {}", i));
    }
  }
  FittedDimension dim;
  dim.sorted_ = std::move(sorted_values);
  dim.skewness_ = skewness;
  return dim;
}

std::size_t FittedDimension::count_le(double z) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), z) -
                                  sorted_.begin());
}

std::size_t FittedDimension::count_ge(double z) const {
  return static_cast<std::size_t>(sorted_.end() -
                                  std::lower_bound(sorted_.begin(), sorted_.end(), z));
}

double FittedDimension::tail_probability(std::size_t count) const {
  return static_cast<double>(std::max<std::size_t>(count, 1)) /
         static_cast<double>(sorted_.size());
}

double FittedDimension::eval_left(double z) const {
  require_finite_query(z);
  return tail_probability(count_le(z));
}

double FittedDimension::eval_right(double z) const {
  require_finite_query(z);
  return tail_probability(count_ge(z));
}

void FittedDimension::eval_tails(std::span<const double> queries, std::span<double> left,
                                 std::span<double> right) const {
  const std::size_t m = queries.size();
  if (left.size() != m || right.size() != m) {
    fail(ErrorKind::InvalidInput, "output spans must match the query count");
  }
  for (double z : queries) require_finite_query(z);

  const std::size_t n = sorted_.size();
  if (m < 64 || m < n / 8) {
    for (std::size_t k = 0; k < m; ++k) {
      left[k] = tail_probability(count_le(queries[k]));
      right[k] = tail_probability(count_ge(queries[k]));
    }
    return;
  }

  std::vector<std::pair<double, std::size_t>> order(m);
  for (std::size_t k = 0; k < m; ++k) order[k] = {queries[k], k};
  std::sort(order.begin(), order.end());

  std::size_t le = 0;  // #{x <= q}
  std::size_t lt = 0;  // #{x <  q}
  for (const auto& [q, k] : order) {
    while (le < n && sorted_[le] <= q) ++le;
    while (lt < n && sorted_[lt] < q) ++lt;
    left[k] = tail_probability(le);
    right[k] = tail_probability(n - lt);
  }
}

}  // namespace tpd
