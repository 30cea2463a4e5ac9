#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tpd {

/// Sample labels use the convention of the decision function: -1 marks an
/// anomaly, +1 normal operation.
enum class Label : std::int8_t { Anomaly = -1, Normal = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }

/// Dense n x d table of finite reals stored column-major, with column names,
/// optional ground-truth labels and an optional opaque index column (e.g.
/// timestamps) that is carried through I/O but never scored.
class DataMatrix {
 public:
  DataMatrix() = default;

  /// Builds from column vectors. All columns must have equal length; names
  /// default to c0..c{d-1} when empty.
  static DataMatrix from_columns(std::vector<std::vector<double>> columns,
                                 std::vector<std::string> names = {});

  /// Builds from row-major data.
  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows,
                              std::vector<std::string> names = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return names_.size(); }

  std::span<const double> column(std::size_t j) const {
    return {values_.data() + j * rows_, rows_};
  }
  std::span<double> column(std::size_t j) { return {values_.data() + j * rows_, rows_}; }

  double at(std::size_t i, std::size_t j) const { return values_[j * rows_ + i]; }
  double& at(std::size_t i, std::size_t j) { return values_[j * rows_ + i]; }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t j) const { return names_[j]; }
  std::optional<std::size_t> find_column(const std::string& name) const;

  const std::optional<std::vector<Label>>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<Label> labels);
  void clear_labels() { labels_.reset(); }

  const std::optional<std::string>& index_name() const noexcept { return index_name_; }
  const std::vector<std::string>& index_values() const noexcept { return index_values_; }
  void set_index(std::string name, std::vector<std::string> values);

  /// Copies the listed rows (in the given order), carrying labels and index.
  DataMatrix select_rows(std::span<const std::size_t> rows) const;

  /// Copies the listed columns; labels and index are carried along.
  DataMatrix select_columns(std::span<const std::size_t> cols) const;

  /// Throws InvalidInput naming the first non-finite cell.
  void require_finite() const;

 private:
  std::size_t rows_ = 0;
  std::vector<double> values_;
  std::vector<std::string> names_;
  std::optional<std::vector<Label>> labels_;
  std::optional<std::string> index_name_;
  std::vector<std::string> index_values_;
};

}  // namespace tpd
