#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tpd/data_matrix.hpp"
#include "tpd/ecdf.hpp"

namespace tpd {

/// Which of the three negative-log aggregates produced a sample's score.
enum class Aggregate : std::uint8_t { Left, Right, SkewCorrected };

struct TailComponents {
  double left = 0.0;            // sum_j -log left_j(x)
  double right = 0.0;           // sum_j -log right_j(x)
  double skew_corrected = 0.0;  // sum_j -log (skew_j < 0 ? left_j : right_j)(x)
};

struct ScoredSample {
  double total = 0.0;
  TailComponents components;
  Aggregate winner = Aggregate::SkewCorrected;
  std::vector<double> per_dim;
};

/// Scores for a batch of samples. Per-dimension contributions are stored
/// row-major (n x d) and always slice the winning aggregate, so each row of
/// per-dimension scores sums to the row's total.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::size_t rows, std::size_t dims);

  std::size_t rows() const noexcept { return totals_.size(); }
  std::size_t dims() const noexcept { return dims_; }

  std::span<const double> totals() const noexcept { return totals_; }
  double total(std::size_t i) const { return totals_[i]; }
  const TailComponents& components(std::size_t i) const { return components_[i]; }
  Aggregate winner(std::size_t i) const { return winners_[i]; }

  std::span<const double> per_dim(std::size_t i) const {
    return {per_dim_.data() + i * dims_, dims_};
  }

  /// Copies dimension j's contribution for every row.
  std::vector<double> dimension_scores(std::size_t j) const;

  ScoredSample sample(std::size_t i) const;

 private:
  friend ScoreTable score_tail_aggregates(std::span<const FittedDimension> dims,
                                          const DataMatrix& x);

  std::size_t dims_ = 0;
  std::vector<double> totals_;
  std::vector<TailComponents> components_;
  std::vector<Aggregate> winners_;
  std::vector<double> per_dim_;
};

/// Shared scoring kernel for both detectors: evaluates every dimension's tail
/// probabilities, aggregates the three negative-log sums and keeps their
/// maximum. On an exact tie the skew-corrected aggregate wins, then left.
/// Throws SchemaMismatch when `x` does not have one column per dimension.
ScoreTable score_tail_aggregates(std::span<const FittedDimension> dims, const DataMatrix& x);

/// Fits one FittedDimension per column of `x`.
std::vector<FittedDimension> fit_dimensions(const DataMatrix& x);

/// Nearest-rank quantile: the ceil(q * n)-th smallest value (1-based, clamped
/// to [1, n]). `q` in [0, 1]; throws InvalidInput on empty input.
double nearest_rank_quantile(std::span<const double> values, double q);

/// Throws InvalidConfig unless 0 <= contamination <= 0.5.
void validate_contamination(double contamination);

}  // namespace tpd
