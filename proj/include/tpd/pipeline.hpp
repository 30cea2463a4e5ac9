#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpd/config.hpp"
#include "tpd/copod.hpp"
#include "tpd/data_matrix.hpp"
#include "tpd/explain.hpp"
#include "tpd/scores.hpp"

namespace tpd {

struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<FeatureKind> kinds;
  std::size_t cardinality_limit = 10;
  std::map<std::string, FeatureKind> overrides;

  /// Indices of the columns with the given kind, in schema order.
  std::vector<std::size_t> columns_of(FeatureKind kind) const;
  std::vector<std::string> names_of(FeatureKind kind) const;
};

/// A column is discrete iff it has at most `limit` distinct values or an
/// override says so. Throws InvalidConfig for limit < 2 or an override naming
/// an unknown column.
FeatureSchema infer_schema(const DataMatrix& x, std::size_t limit,
                           const std::map<std::string, FeatureKind>& overrides = {});

/// Min-max scaling to [0, 1] fitted on training data. Constant columns map to 0.
struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;

  static NormalizationParams fit(const DataMatrix& x);
  DataMatrix apply(const DataMatrix& x) const;
};

/// One of the two copula detectors together with the columns it owns and the
/// bands used to explain its scores.
struct Branch {
  std::vector<std::string> columns;
  CopodModel model;
  PercentileBands bands;
};

struct TpdModel {
  FeatureSchema schema;
  NormalizationParams norm;          // continuous branch only
  std::optional<Branch> discrete;    // raw discrete columns
  std::optional<Branch> continuous;  // normalised continuous columns
  RunConfig config;
  std::size_t training_rows = 0;     // rows entering the noise filter
  std::size_t removed_rows = 0;      // rows the noise filter dropped

  bool single_branch() const noexcept { return !discrete || !continuous; }
};

struct TrainReport {
  std::vector<std::size_t> removed;
  std::vector<std::string> warnings;
};

/// Noise filter -> discrete/continuous split -> min-max on the clean continuous
/// slice -> one copula detector per non-empty slice. When every column has the
/// same kind a single detector is trained and a warning is recorded.
TpdModel train_tpd(const DataMatrix& x, const RunConfig& config, TrainReport* report = nullptr);

/// O = 1 when the labels call for an anomaly under `mode`.
std::uint8_t combine_decisions(Label discrete, Label continuous, CombinerMode mode);

/// Streaming form of the trailing-window rule: the decision for the newest
/// sample is -1 iff at least `ratio` of the last `length` combined decisions
/// (fewer while warming up) are 1. One instance per stream.
class DecisionWindow {
 public:
  explicit DecisionWindow(WindowConfig config);

  Label push(std::uint8_t combined);
  void reset();

 private:
  WindowConfig config_;
  std::vector<std::uint8_t> ring_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
  std::size_t ones_ = 0;
};

std::vector<Label> window_decision(std::span<const std::uint8_t> combined, WindowConfig config);

struct BranchScores {
  std::vector<std::string> columns;
  ScoreTable scores;
  std::vector<Label> labels;
};

struct ScoreReport {
  std::optional<BranchScores> discrete;
  std::optional<BranchScores> continuous;
  std::vector<std::uint8_t> combined;
  std::vector<Label> final_labels;

  std::size_t rows() const noexcept { return final_labels.size(); }
};

/// Columns are matched by name, so their order in `x` does not matter; extra
/// columns are ignored and a missing one raises SchemaMismatch.
ScoreReport predict_tpd(const TpdModel& model, const DataMatrix& x);

struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // False when the corresponding denominator was zero and 0 was reported.
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

/// Anomaly (-1) is the positive class.
Metrics evaluate(std::span<const Label> predicted, std::span<const Label> truth);

/// Maps combined decisions onto labels (1 -> -1, 0 -> +1).
std::vector<Label> labels_from_combined(std::span<const std::uint8_t> combined);

}  // namespace tpd
