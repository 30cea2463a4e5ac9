#include "tpd/pipeline.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "tpd/ecod.hpp"
#include "tpd/error.hpp"

namespace tpd {

std::vector<std::size_t> FeatureSchema::columns_of(FeatureKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    if (kinds[j] == kind) out.push_back(j);
  }
  return out;
}

std::vector<std::string> FeatureSchema::names_of(FeatureKind kind) const {
  std::vector<std::string> out;
  for (auto j : columns_of(kind)) out.push_back(names[j]);
  return out;
}

FeatureSchema infer_schema(const DataMatrix& x, std::size_t limit,
                           const std::map<std::string, FeatureKind>& overrides) {
  if (limit < 2) fail(ErrorKind::InvalidConfig, "discrete cardinality limit must be at least 2");
  if (x.rows() < 1) fail(ErrorKind::InvalidInput, "cannot infer a schema from zero rows");
  for (const auto& [name, kind] : overrides) {
    if (!x.find_column(name)) {
      fail(ErrorKind::InvalidConfig, fmt::format("override names unknown column '{}'", name));
    }
  }
  FeatureSchema schema;
  schema.names = x.names();
  schema.cardinality_limit = limit;
  schema.overrides = overrides;
  schema.kinds.reserve(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (auto it = overrides.find(x.name(j)); it != overrides.end()) {
      schema.kinds.push_back(it->second);
      continue;
    }
    std::unordered_set<double> distinct;
    bool discrete = true;
    for (double v : x.column(j)) {
      distinct.insert(v);
      if (distinct.size() > limit) {
        discrete = false;
        break;
      }
    }
    schema.kinds.push_back(discrete ? FeatureKind::Discrete : FeatureKind::Continuous);
  }
  return schema;
}

NormalizationParams NormalizationParams::fit(const DataMatrix& x) {
  NormalizationParams p;
  p.min.resize(x.cols());
  p.max.resize(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto col = x.column(j);
    if (col.empty()) fail(ErrorKind::InvalidInput, "cannot normalise an empty column");
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    p.min[j] = *lo;
    p.max[j] = *hi;
  }
  return p;
}

DataMatrix NormalizationParams::apply(const DataMatrix& x) const {
  if (x.cols() != min.size()) {
    fail(ErrorKind::SchemaMismatch, fmt::format("normalisation fitted on {} columns, got {}",
                                                min.size(), x.cols()));
  }
  DataMatrix out = x;
  for (std::size_t j = 0; j < out.cols(); ++j) {
    const double range = max[j] - min[j];
    for (double& v : out.column(j)) v = range > 0.0 ? (v - min[j]) / range : 0.0;
  }
  return out;
}

namespace {

Branch fit_branch(const DataMatrix& slice, const RunConfig& config) {
  Branch b;
  b.columns = slice.names();
  b.model = fit_copod(slice, config.contamination);
  const ScoreTable train = score_copod(b.model, slice);
  b.bands = fit_bands(train, config.lower_percentile, config.upper_percentile);
  return b;
}

std::vector<std::size_t> locate_columns(const DataMatrix& x,
                                        const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& name : names) {
    auto j = x.find_column(name);
    if (!j) fail(ErrorKind::SchemaMismatch, fmt::format("missing column '{}'", name));
    idx.push_back(*j);
  }
  return idx;
}

}  // namespace

TpdModel train_tpd(const DataMatrix& x, const RunConfig& config, TrainReport* report) {
  config.validate();
  NoiseFilterResult filtered = filter_noise(x, config.contamination);
  const DataMatrix& clean = filtered.clean;

  TpdModel model;
  model.config = config;
  model.training_rows = x.rows();
  model.removed_rows = filtered.removed.size();
  model.schema = infer_schema(clean, config.discrete_cardinality_limit, config.kind_overrides);

  std::vector<std::string> warnings;
  const auto discrete_cols = model.schema.columns_of(FeatureKind::Discrete);
  const auto continuous_cols = model.schema.columns_of(FeatureKind::Continuous);
  if (!discrete_cols.empty()) {
    model.discrete = fit_branch(clean.select_columns(discrete_cols), config);
  }
  if (!continuous_cols.empty()) {
    const DataMatrix raw = clean.select_columns(continuous_cols);
    model.norm = NormalizationParams::fit(raw);
    model.continuous = fit_branch(model.norm.apply(raw), config);
  }
  if (model.single_branch()) {
    warnings.push_back(fmt::format(
        "SingleBranch: every column is {}, training one detector only",
        discrete_cols.empty() ? "continuous" : "discrete"));
  }
  if (report) {
    report->removed = std::move(filtered.removed);
    report->warnings = std::move(warnings);
  }
  return model;
}

std::uint8_t combine_decisions(Label discrete, Label continuous, CombinerMode mode) {
  const bool a = discrete == Label::Anomaly;
  const bool b = continuous == Label::Anomaly;
  return mode == CombinerMode::Or ? (a || b) : (a && b);
}

DecisionWindow::DecisionWindow(WindowConfig config) : config_(config) {
  config_.validate();
  ring_.assign(config_.length, 0);
}

Label DecisionWindow::push(std::uint8_t combined) {
  const std::uint8_t bit = combined ? 1 : 0;
  if (filled_ == ring_.size()) {
    ones_ -= ring_[next_];
  } else {
    ++filled_;
  }
  ring_[next_] = bit;
  ones_ += bit;
  next_ = (next_ + 1) % ring_.size();
  // ones / filled >= ratio, compared without dividing; the slack absorbs the
  // representation error of ratios such as 0.8.
  const bool anomalous =
      static_cast<double>(ones_) + 1e-9 >= config_.ratio * static_cast<double>(filled_);
  return anomalous ? Label::Anomaly : Label::Normal;
}

void DecisionWindow::reset() {
  std::fill(ring_.begin(), ring_.end(), 0);
  next_ = filled_ = ones_ = 0;
}

std::vector<Label> window_decision(std::span<const std::uint8_t> combined, WindowConfig config) {
  DecisionWindow window(config);
  std::vector<Label> out;
  out.reserve(combined.size());
  for (auto o : combined) out.push_back(window.push(o));
  return out;
}

ScoreReport predict_tpd(const TpdModel& model, const DataMatrix& x) {
  ScoreReport report;
  const std::size_t n = x.rows();
  if (model.discrete) {
    const DataMatrix slice = x.select_columns(locate_columns(x, model.discrete->columns));
    BranchScores s;
    s.columns = model.discrete->columns;
    s.scores = score_copod(model.discrete->model, slice);
    s.labels = labels_from_scores(model.discrete->model, s.scores.totals());
    report.discrete = std::move(s);
  }
  if (model.continuous) {
    const DataMatrix slice =
        model.norm.apply(x.select_columns(locate_columns(x, model.continuous->columns)));
    BranchScores s;
    s.columns = model.continuous->columns;
    s.scores = score_copod(model.continuous->model, slice);
    s.labels = labels_from_scores(model.continuous->model, s.scores.totals());
    report.continuous = std::move(s);
  }

  report.combined.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (report.discrete && report.continuous) {
      report.combined[i] = combine_decisions(report.discrete->labels[i],
                                             report.continuous->labels[i], model.config.combiner);
    } else {
      const auto& only = report.discrete ? *report.discrete : *report.continuous;
      report.combined[i] = only.labels[i] == Label::Anomaly;
    }
  }
  report.final_labels = window_decision(report.combined, model.config.window);
  return report;
}

std::vector<Label> labels_from_combined(std::span<const std::uint8_t> combined) {
  std::vector<Label> out(combined.size());
  for (std::size_t i = 0; i < combined.size(); ++i) {
    out[i] = combined[i] ? Label::Anomaly : Label::Normal;
  }
  return out;
}

}  // namespace tpd
