#include "tpd/data_matrix.hpp"

#include <cmath>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

namespace {

std::vector<std::string> default_names(std::size_t d, std::vector<std::string> names) {
  if (names.empty()) {
    names.reserve(d);
    for (std::size_t j = 0; j < d; ++j) names.push_back(fmt::format("c{}", j));
  }
  if (names.size() != d) {
    fail(ErrorKind::InvalidInput,
         fmt::format("{} column names given for {} columns", names.size(), d));
  }
  return names;
}

}  // namespace

DataMatrix DataMatrix::from_columns(std::vector<std::vector<double>> columns,
                                    std::vector<std::string> names) {
  DataMatrix m;
  m.names_ = default_names(columns.size(), std::move(names));
  m.rows_ = columns.empty() ? 0 : columns.front().size();
  m.values_.reserve(m.rows_ * columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != m.rows_) {
      fail(ErrorKind::InvalidInput,
           fmt::format("column {} has {} rows, expected {}", j, columns[j].size(), m.rows_));
    }
    m.values_.insert(m.values_.end(), columns[j].begin(), columns[j].end());
  }
  return m;
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                 std::vector<std::string> names) {
  const std::size_t d = rows.empty() ? names.size() : rows.front().size();
  std::vector<std::vector<double>> columns(d, std::vector<double>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      fail(ErrorKind::InvalidInput,
           fmt::format("row {} has {} values, expected {}", i, rows[i].size(), d));
    }
    for (std::size_t j = 0; j < d; ++j) columns[j][i] = rows[i][j];
  }
  return from_columns(std::move(columns), std::move(names));
}

std::optional<std::size_t> DataMatrix::find_column(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  return std::nullopt;
}

void DataMatrix::set_labels(std::vector<Label> labels) {
  if (labels.size() != rows_) {
    fail(ErrorKind::InvalidInput,
         fmt::format("{} labels given for {} rows", labels.size(), rows_));
  }
  labels_ = std::move(labels);
}

void DataMatrix::set_index(std::string name, std::vector<std::string> values) {
  if (values.size() != rows_) {
    fail(ErrorKind::InvalidInput,
         fmt::format("{} index values given for {} rows", values.size(), rows_));
  }
  index_name_ = std::move(name);
  index_values_ = std::move(values);
}

DataMatrix DataMatrix::select_rows(std::span<const std::size_t> rows) const {
  DataMatrix m;
  m.names_ = names_;
  m.rows_ = rows.size();
  m.values_.resize(m.rows_ * cols());
  for (std::size_t j = 0; j < cols(); ++j) {
    const auto src = column(j);
    auto dst = m.column(j);
    for (std::size_t k = 0; k < rows.size(); ++k) dst[k] = src[rows[k]];
  }
  if (labels_) {
    std::vector<Label> l;
    l.reserve(rows.size());
    for (auto r : rows) l.push_back((*labels_)[r]);
    m.labels_ = std::move(l);
  }
  if (index_name_) {
    m.index_name_ = index_name_;
    m.index_values_.reserve(rows.size());
    for (auto r : rows) m.index_values_.push_back(index_values_[r]);
  }
  return m;
}

DataMatrix DataMatrix::select_columns(std::span<const std::size_t> cols) const {
  DataMatrix m;
  m.rows_ = rows_;
  m.values_.reserve(rows_ * cols.size());
  for (auto j : cols) {
    if (j >= names_.size()) {
      fail(ErrorKind::SchemaMismatch, fmt::format("column index {} out of range", j));
    }
    m.names_.push_back(names_[j]);
    const auto src = column(j);
    m.values_.insert(m.values_.end(), src.begin(), src.end());
  }
  m.labels_ = labels_;
  m.index_name_ = index_name_;
  m.index_values_ = index_values_;
  return m;
}

void DataMatrix::require_finite() const {
  for (std::size_t j = 0; j < cols(); ++j) {
    const auto col = column(j);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!std::isfinite(col[i])) {
        fail(ErrorKind::InvalidInput,
             fmt::format("non-finite value at row {}, column '{}'", i, names_[j]));
      }
    }
  }
}

}  // namespace tpd
