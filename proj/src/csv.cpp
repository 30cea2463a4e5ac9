#include "tpd/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower_no_space(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::size_t> pick_column(const std::vector<std::string>& header,
                                       const std::optional<std::string>& configured,
                                       std::initializer_list<std::string_view> defaults,
                                       std::string_view what) {
  if (configured) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == trim(*configured)) return j;
    }
    fail(ErrorKind::InvalidInput, fmt::format("{} column '{}' not in header", what, *configured));
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    const auto key = lower_no_space(header[j]);
    for (auto d : defaults) {
      if (key == d) return j;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

Label parse_label(std::string_view cell) {
  const auto key = lower_no_space(cell);
  if (key == "normal" || key == "1" || key == "+1" || key == "1.0") return Label::Normal;
  if (key == "attack" || key == "-1" || key == "-1.0") return Label::Anomaly;
  fail(ErrorKind::InvalidInput, fmt::format("unrecognised label '{}'", cell));
}

DataMatrix read_csv(std::istream& in, const RunConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  if (!next_line()) fail(ErrorKind::InvalidInput, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto& f : split_csv_line(line)) header.emplace_back(trim(f));

  const auto label_col = pick_column(header, config.label_column, {"label", "normal/attack"}, "label");
  const auto index_col = pick_column(header, config.index_column, {"timestamp"}, "index");
  if (label_col && index_col && *label_col == *index_col) {
    fail(ErrorKind::InvalidInput, "label and index column must differ");
  }

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == label_col || j == index_col) continue;
    if (header[j].empty()) fail(ErrorKind::InvalidInput, fmt::format("column {} has no name", j));
    feature_cols.push_back(j);
    names.push_back(header[j]);
  }

  if (feature_cols.empty()) fail(ErrorKind::InvalidInput, "no feature columns in header");

  std::vector<std::vector<double>> columns(feature_cols.size());
  std::vector<Label> labels;
  std::vector<std::string> index;
  while (next_line()) {
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::InvalidInput, fmt::format("line {}: {} cells, header has {}", line_no,
                                                cells.size(), header.size()));
    }
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto v = parse_number(cells[feature_cols[k]]);
      if (!v) {
        fail(ErrorKind::InvalidInput,
             fmt::format("line {}, column '{}': '{}' is not a finite number", line_no, names[k],
                         cells[feature_cols[k]]));
      }
      columns[k].push_back(*v);
    }
    if (label_col) {
      try {
        labels.push_back(parse_label(cells[*label_col]));
      } catch (const Error&) {
        fail(ErrorKind::InvalidInput, fmt::format("line {}: unrecognised label '{}'", line_no,
                                                  cells[*label_col]));
      }
    }
    if (index_col) index.emplace_back(trim(cells[*index_col]));
  }

  DataMatrix m = DataMatrix::from_columns(std::move(columns), std::move(names));
  if (label_col) m.set_labels(std::move(labels));
  if (index_col) m.set_index(header[*index_col], std::move(index));
  return m;
}

DataMatrix load_csv(const std::filesystem::path& path, const RunConfig& config) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, fmt::format("cannot open '{}'", path.string()));
  return read_csv(in, config);
}

void write_csv(const DataMatrix& x, std::ostream& out, const std::string& label_name) {
  std::vector<std::string> header;
  if (x.index_name()) header.push_back(*x.index_name());
  for (const auto& name : x.names()) header.push_back(name);
  if (x.labels()) header.push_back(label_name);
  out << fmt::format("{}\n", fmt::join(header, ","));

  std::string row;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    row.clear();
    if (x.index_name()) row += x.index_values()[i] + ",";
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j > 0) row += ',';
      row += fmt::format("{}", x.at(i, j));
    }
    if (x.labels()) row += fmt::format(",{}", to_int((*x.labels())[i]));
    row += '\n';
    out << row;
  }
}

void write_csv(const DataMatrix& x, const std::filesystem::path& path,
               const std::string& label_name) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", path.string()));
  write_csv(x, out, label_name);
}

}  // namespace tpd
