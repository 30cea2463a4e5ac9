#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tpd {

inline constexpr double kSkewnessZeroTolerance = 1e-10;

/// One fitted column: its training values in ascending order plus the sample
/// skewness that decides which tail the skewness-corrected score reads.
///
/// Tail probabilities are the empirical CDFs
///   left(z)  = #{x_i <= z} / n
///   right(z) = #{x_i >= z} / n
/// clamped below at 1/n so that -log stays finite for query points outside
/// the training range. Ties count with full mass on both sides.
///
/// Immutable after construction; concurrent evaluation is safe.
class FittedDimension {
 public:
  FittedDimension() = default;

  /// Rebuilds a dimension from persisted parts. `sorted_values` must be
  /// non-empty, finite and non-decreasing; `skewness` must be finite.
  static FittedDimension from_parts(std::vector<double> sorted_values, double skewness);

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted_values() const noexcept { return sorted_; }
  double skewness() const noexcept { return skewness_; }

  /// True when the skewness-corrected tail is the left one (skewness < 0).
  bool prefers_left_tail() const noexcept { return skewness_ < 0.0; }

  std::size_t count_le(double z) const;
  std::size_t count_ge(double z) const;

  double eval_left(double z) const;
  double eval_right(double z) const;

  /// Batch form of eval_left/eval_right. For large batches the queries are
  /// sorted once and merged against the training values, which is much
  /// friendlier to the cache than one binary search per query.
  void eval_tails(std::span<const double> queries, std::span<double> left,
                  std::span<double> right) const;

 private:
  friend FittedDimension fit_dimension(std::span<const double> column);

  double tail_probability(std::size_t count) const;

  std::vector<double> sorted_;
  double skewness_ = 0.0;
};

/// Sorts a copy of the column and computes its skewness. Throws InvalidInput
/// on an empty column or a non-finite value (naming the row).
FittedDimension fit_dimension(std::span<const double> column);

/// Standardized third moment with an (n-1) normalisation on both the
/// variance and the third-moment sum:
///   sum (x - mean)^3 / ((n-1) * s^3),   s^2 = sum (x - mean)^2 / (n-1).
/// Constant columns (and n == 1) have skewness 0, and so does any column whose
/// skewness magnitude is below kSkewnessZeroTolerance: the sign of a
/// numerically-zero skewness is rounding noise and would otherwise pick the
/// tail at random.
double sample_skewness(std::span<const double> column);

}  // namespace tpd
