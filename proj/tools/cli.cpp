#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "tpd/config.hpp"
#include "tpd/csv.hpp"
#include "tpd/ecod.hpp"
#include "tpd/error.hpp"
#include "tpd/explain.hpp"
#include "tpd/model_io.hpp"
#include "tpd/pipeline.hpp"
#include "tpd/synthetic.hpp"

namespace tpd::cli {

namespace {

using nlohmann::json;

/// Flags shared by every command that builds a RunConfig. Values given on the
/// command line override the --config file, which overrides the defaults.
struct ConfigFlags {
  std::string config_file;
  double contamination = 0.0;
  std::size_t cardinality_limit = 0;
  std::string combiner;
  std::size_t window = 0;
  double ratio = 0.0;
  double sampling_rate = 0.0;
  std::vector<double> percentiles;
  std::string label_column;
  std::string index_column;
  std::vector<std::string> discrete;
  std::vector<std::string> continuous;
  std::uint64_t seed = 0;

  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app, bool model_flags) {
    opts["config"] = app->add_option("--config", config_file, "JSON run configuration");
    opts["label"] = app->add_option("--label-column", label_column, "ground-truth label column");
    opts["index"] = app->add_option("--index-column", index_column, "opaque index column (never scored)");
    if (!model_flags) return;
    opts["contamination"] = app->add_option("--contamination", contamination, "fraction in [0, 0.5]");
    opts["limit"] = app->add_option("--cardinality-limit", cardinality_limit,
                                    "max distinct values of a discrete column");
    opts["combiner"] = app->add_option("--combiner", combiner, "or | and");
    opts["window"] = app->add_option("--window", window, "decision window length in samples");
    opts["ratio"] = app->add_option("--ratio", ratio, "anomalous fraction that trips the window");
    opts["rate"] = app->add_option("--sampling-rate", sampling_rate, "samples per second (informational)");
    opts["percentiles"] = app->add_option("--percentiles", percentiles, "lower and upper band levels")
                              ->expected(2);
    opts["discrete"] = app->add_option("--discrete", discrete, "force columns to be discrete")
                           ->delimiter(',');
    opts["continuous"] = app->add_option("--continuous", continuous, "force columns to be continuous")
                             ->delimiter(',');
    opts["seed"] = app->add_option("--seed", seed, "seed recorded in the config");
  }

  bool given(const std::string& key) const {
    auto it = opts.find(key);
    return it != opts.end() && it->second->count() > 0;
  }

  RunConfig resolve() const {
    RunConfig c = given("config") ? load_config(config_file) : RunConfig{};
    if (given("contamination")) c.contamination = contamination;
    if (given("limit")) c.discrete_cardinality_limit = cardinality_limit;
    if (given("combiner")) c.combiner = parse_combiner(combiner);
    if (given("window")) c.window.length = window;
    if (given("ratio")) c.window.ratio = ratio;
    if (given("rate")) c.sampling_rate_hz = sampling_rate;
    if (given("percentiles")) {
      c.lower_percentile = percentiles.at(0);
      c.upper_percentile = percentiles.at(1);
    }
    if (given("label")) c.label_column = label_column;
    if (given("index")) c.index_column = index_column;
    for (const auto& name : discrete) c.kind_overrides[name] = FeatureKind::Discrete;
    for (const auto& name : continuous) c.kind_overrides[name] = FeatureKind::Continuous;
    if (given("seed")) c.seed = seed;
    c.validate();
    return c;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", path));
  return out;
}

std::string label_name(const RunConfig& c) { return c.label_column.value_or("label"); }

json explanation_json(const Explanation& e, const std::vector<std::string>& names,
                      const PercentileBands& bands, std::string_view model, double score,
                      double threshold) {
  const std::string lower_key = fmt::format("band{}", bands.lower_level);
  const std::string upper_key = fmt::format("band{}", bands.upper_level);
  json dims = json::array();
  for (std::size_t j = 0; j < e.scores.size(); ++j) {
    dims.push_back({{"name", names[j]},
                    {"score", e.scores[j]},
                    {lower_key, bands.lower[j]},
                    {upper_key, bands.upper[j]},
                    {"flag", flag_name(e.flags[j], bands)}});
  }
  std::vector<std::string> above;
  for (auto j : e.above_upper) above.push_back(names[j]);
  return {{"sample", e.sample},
          {"model", model},
          {"verdict", to_int(e.verdict)},
          {"score", score},
          {"threshold", threshold},
          {"above_upper", above},
          {"narrative", e.narrative(names)},
          {"dimensions", dims}};
}

void write_columnar_header(std::ostream& out, const PercentileBands& bands) {
  out << fmt::format("sample,model,dimension,score,band{},band{},flag\n", bands.lower_level,
                     bands.upper_level);
}

void write_columnar(std::ostream& out, const Explanation& e, const std::vector<std::string>& names,
                    const PercentileBands& bands, std::string_view model) {
  for (std::size_t j = 0; j < e.scores.size(); ++j) {
    out << fmt::format("{},{},{},{},{},{},{}\n", e.sample, model, names[j], e.scores[j],
                       bands.lower[j], bands.upper[j], flag_name(e.flags[j], bands));
  }
}

// ---------------------------------------------------------------- commands

int cmd_gen(std::size_t rows, std::size_t discrete, std::size_t continuous, const AnomalySpec& spec,
            std::uint64_t seed, const std::string& output, std::ostream& out) {
  const SyntheticData data = generate_synthetic(rows, discrete, continuous, spec, seed);
  write_csv(data.data, std::filesystem::path(output), "label");
  out << fmt::format("wrote {} rows x {} columns ({} anomaly runs, {} anomalous rows) to {}\n",
                     rows, discrete + continuous, data.runs.size(),
                     std::count(data.truth.begin(), data.truth.end(), Label::Anomaly), output);
  return kExitOk;
}

int cmd_filter(const RunConfig& config, const std::string& input, const std::string& output,
               const std::string& scores_path, const std::string& explain_path,
               std::ostream& out) {
  const DataMatrix x = load_csv(input, config);
  const NoiseFilterResult r = filter_noise(x, config.contamination);
  write_csv(r.clean, std::filesystem::path(output), label_name(config));

  if (!scores_path.empty()) {
    auto f = open_output(scores_path);
    f << "sample,score,left,right,skew_corrected,removed\n";
    auto rm = r.removed.begin();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const bool removed = rm != r.removed.end() && *rm == i;
      if (removed) ++rm;
      const auto& c = r.scores.components(i);
      f << fmt::format("{},{},{},{},{},{}\n", i, r.scores.total(i), c.left, c.right,
                       c.skew_corrected, removed ? 1 : 0);
    }
  }
  if (!explain_path.empty()) {
    const PercentileBands bands =
        fit_bands(r.scores, config.lower_percentile, config.upper_percentile);
    auto f = open_output(explain_path);
    for (auto i : r.removed) {
      const Explanation e = explain_sample(i, r.scores.per_dim(i), bands, Label::Anomaly);
      f << explanation_json(e, x.names(), bands, "ecod", r.scores.total(i), r.threshold).dump()
        << '\n';
    }
  }
  out << json{{"rows", x.rows()},
              {"removed", r.removed.size()},
              {"kept", r.clean.rows()},
              {"threshold", r.threshold}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& config, const std::string& input, const std::string& model_path,
              std::ostream& out, std::ostream& err) {
  const DataMatrix x = load_csv(input, config);
  TrainReport report;
  const TpdModel model = train_tpd(x, config, &report);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  save_model(model, model_path);

  json summary{{"training_rows", model.training_rows},
               {"removed_rows", model.removed_rows},
               {"phase2_rows", model.training_rows - model.removed_rows}};
  if (model.discrete) {
    summary["discrete"] = {{"columns", model.discrete->columns},
                           {"threshold", model.discrete->model.threshold}};
  }
  if (model.continuous) {
    summary["continuous"] = {{"columns", model.continuous->columns},
                             {"threshold", model.continuous->model.threshold}};
  }
  out << summary.dump() << '\n';
  return kExitOk;
}

RunConfig reading_config(const TpdModel& model, const ConfigFlags& flags) {
  RunConfig c = model.config;
  if (flags.given("label")) c.label_column = flags.label_column;
  if (flags.given("index")) c.index_column = flags.index_column;
  return c;
}

std::string top_dimensions(const ScoreReport& report, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto* b : {&report.continuous, &report.discrete}) {
    if (!*b) continue;
    const auto row = (*b)->scores.per_dim(i);
    for (std::size_t j = 0; j < row.size(); ++j) all.emplace_back(row[j], (*b)->columns[j]);
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> names;
  for (std::size_t t = 0; t < std::min(k, all.size()); ++t) names.push_back(all[t].second);
  return fmt::format("{}", fmt::join(names, ";"));
}

int cmd_score(const ConfigFlags& flags, const std::string& model_path, const std::string& input,
              const std::string& output, std::ostream& out) {
  const TpdModel model = load_model(model_path);
  const DataMatrix x = load_csv(input, reading_config(model, flags));
  const ScoreReport report = predict_tpd(model, x);

  auto f = open_output(output);
  const bool has_index = x.index_name().has_value();
  f << "sample" << (has_index ? "," + *x.index_name() : std::string())
    << ",score_discrete,score_continuous,combined,final_label,top_dimensions\n";
  const auto score_cell = [](const std::optional<BranchScores>& b, std::size_t i) {
    return b ? fmt::format("{}", b->scores.total(i)) : std::string();
  };
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < report.rows(); ++i) {
    flagged += report.final_labels[i] == Label::Anomaly;
    f << fmt::format("{}{},{},{},{},{},{}\n", i, has_index ? "," + x.index_values()[i] : "",
                     score_cell(report.discrete, i), score_cell(report.continuous, i),
                     report.combined[i], to_int(report.final_labels[i]),
                     top_dimensions(report, i, 3));
  }
  out << json{{"rows", report.rows()}, {"anomalous", flagged}}.dump() << '\n';
  return kExitOk;
}

int cmd_explain(const ConfigFlags& flags, const std::string& model_path, const std::string& input,
                const std::string& output, const std::string& columns_path,
                const std::vector<std::size_t>& rows, bool all_rows, std::ostream& out) {
  const TpdModel model = load_model(model_path);
  const DataMatrix x = load_csv(input, reading_config(model, flags));
  const ScoreReport report = predict_tpd(model, x);

  std::vector<std::size_t> selected;
  if (!rows.empty()) {
    for (auto i : rows) {
      if (i >= report.rows()) fail(ErrorKind::InvalidInput, fmt::format("row {} out of range", i));
    }
    selected = rows;
  } else {
    for (std::size_t i = 0; i < report.rows(); ++i) {
      if (all_rows || report.combined[i]) selected.push_back(i);
    }
  }

  auto f = open_output(output);
  std::optional<std::ofstream> cols;
  if (!columns_path.empty()) {
    cols = open_output(columns_path);
    const auto& any = model.continuous ? model.continuous->bands : model.discrete->bands;
    write_columnar_header(*cols, any);
  }
  const std::pair<const char*, std::pair<const std::optional<Branch>*, const std::optional<BranchScores>*>>
      branches[] = {{"discrete", {&model.discrete, &report.discrete}},
                    {"continuous", {&model.continuous, &report.continuous}}};
  for (auto i : selected) {
    for (const auto& [name, pair] : branches) {
      const auto& branch = *pair.first;
      const auto& scores = *pair.second;
      if (!branch) continue;
      const Explanation e =
          explain_sample(i, scores->scores.per_dim(i), branch->bands, scores->labels[i]);
      f << explanation_json(e, branch->columns, branch->bands, name, scores->scores.total(i),
                            branch->model.threshold)
               .dump()
        << '\n';
      if (cols) write_columnar(*cols, e, branch->columns, branch->bands, name);
    }
  }
  out << json{{"explained", selected.size()}}.dump() << '\n';
  return kExitOk;
}

std::vector<Label> read_prediction_column(const std::string& path, const std::string& stream) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, fmt::format("cannot open '{}'", path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::InvalidInput, "scores file has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  const std::string wanted = stream == "combined" ? "combined" : "final_label";
  const auto it = std::find(header.begin(), header.end(), wanted);
  if (it == header.end()) {
    fail(ErrorKind::InvalidInput, fmt::format("scores file lacks a '{}' column", wanted));
  }
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() <= col) fail(ErrorKind::InvalidInput, "ragged scores file");
    if (stream == "combined") {
      labels.push_back(cells[col] == "1" ? Label::Anomaly : Label::Normal);
    } else {
      labels.push_back(parse_label(cells[col]));
    }
  }
  return labels;
}

int cmd_eval(const RunConfig& config, const std::string& scores_path, const std::string& truth_path,
             const std::string& stream, std::ostream& out) {
  if (stream != "final" && stream != "combined") {
    fail(ErrorKind::InvalidConfig, fmt::format("unknown stream '{}' (final|combined)", stream));
  }
  const auto predicted = read_prediction_column(scores_path, stream);
  const DataMatrix truth = load_csv(truth_path, config);
  if (!truth.labels()) fail(ErrorKind::InvalidInput, "truth file has no label column");
  const Metrics m = evaluate(predicted, *truth.labels());
  out << json{{"stream", stream},
              {"tp", m.tp},
              {"fp", m.fp},
              {"tn", m.tn},
              {"fn", m.fn},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"precision_defined", m.precision_defined},
              {"recall_defined", m.recall_defined},
              {"f1_defined", m.f1_defined}}
             .dump()
      << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-phase dual copula anomaly detection for ICS data", "tpdcopod"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic ICS-like CSV with planted anomalies");
  std::size_t gen_rows = 0, gen_discrete = 5, gen_continuous = 15;
  AnomalySpec spec;
  std::uint64_t gen_seed = 0;
  bool no_faults = false;
  std::string gen_out;
  gen->add_option("--rows", gen_rows)->required();
  gen->add_option("--discrete", gen_discrete, "actuator columns");
  gen->add_option("--continuous", gen_continuous, "sensor columns");
  gen->add_option("--anomaly-rate", spec.rate);
  gen->add_option("--min-run", spec.min_run);
  gen->add_option("--max-run", spec.max_run);
  gen->add_option("--shift-sigma", spec.shift_sigma);
  gen->add_option("--shift-fraction", spec.shifted_fraction);
  gen->add_option("--glitch-rate", spec.glitch_rate);
  gen->add_flag("--no-actuator-faults", no_faults);
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--output", gen_out)->required();

  // filter
  auto* filter = app.add_subcommand("filter", "remove the noisiest training rows (phase 1)");
  ConfigFlags filter_flags;
  filter_flags.attach(filter, true);
  std::string filter_in, filter_out, filter_scores, filter_explain;
  filter->add_option("-i,--input", filter_in)->required();
  filter->add_option("-o,--output", filter_out, "clean CSV")->required();
  filter->add_option("--scores", filter_scores, "per-row scores CSV");
  filter->add_option("--explain", filter_explain, "explanations of removed rows (JSON lines)");

  // train
  auto* train = app.add_subcommand("train", "train the two-phase model");
  ConfigFlags train_flags;
  train_flags.attach(train, true);
  std::string train_in, train_model;
  train->add_option("-i,--input", train_in)->required();
  train->add_option("-m,--model", train_model)->required();

  // score
  auto* score = app.add_subcommand("score", "score a CSV stream with a trained model");
  ConfigFlags score_flags;
  score_flags.attach(score, false);
  std::string score_model, score_in, score_out;
  score->add_option("-m,--model", score_model)->required();
  score->add_option("-i,--input", score_in)->required();
  score->add_option("-o,--output", score_out)->required();

  // explain
  auto* explain = app.add_subcommand("explain", "per-feature explanations against percentile bands");
  ConfigFlags explain_flags;
  explain_flags.attach(explain, false);
  std::string explain_model, explain_in, explain_out, explain_cols;
  std::vector<std::size_t> explain_rows;
  bool explain_all = false;
  explain->add_option("-m,--model", explain_model)->required();
  explain->add_option("-i,--input", explain_in)->required();
  explain->add_option("-o,--output", explain_out, "JSON lines, one record per sample and model")
      ->required();
  explain->add_option("--columns", explain_cols, "columnar CSV export");
  explain->add_option("--rows", explain_rows, "explain these rows (default: rows flagged by O)")
      ->delimiter(',');
  explain->add_flag("--all", explain_all, "explain every row");

  // eval
  auto* eval = app.add_subcommand("eval", "precision / recall / F1 of a scores file");
  ConfigFlags eval_flags;
  eval_flags.attach(eval, false);
  std::string eval_scores, eval_truth, eval_stream = "final";
  eval->add_option("--scores", eval_scores)->required();
  eval->add_option("--truth", eval_truth, "CSV with a label column")->required();
  eval->add_option("--stream", eval_stream, "final | combined");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (gen->parsed()) {
      spec.actuator_faults = !no_faults;
      return cmd_gen(gen_rows, gen_discrete, gen_continuous, spec, gen_seed, gen_out, out);
    }
    if (filter->parsed()) {
      return cmd_filter(filter_flags.resolve(), filter_in, filter_out, filter_scores,
                        filter_explain, out);
    }
    if (train->parsed()) return cmd_train(train_flags.resolve(), train_in, train_model, out, err);
    if (score->parsed()) return cmd_score(score_flags, score_model, score_in, score_out, out);
    if (explain->parsed()) {
      return cmd_explain(explain_flags, explain_model, explain_in, explain_out, explain_cols,
                         explain_rows, explain_all, out);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_flags.resolve(), eval_scores, eval_truth, eval_stream, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::CorruptModel ? kExitCorruptModel : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace tpd::cli
