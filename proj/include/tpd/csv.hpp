#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tpd/config.hpp"
#include "tpd/data_matrix.hpp"

namespace tpd {

/// Reads a headed CSV of numeric cells.
///
/// The label column is `config.label_column` when set, otherwise a column
/// named "label" or "Normal/Attack" (case-insensitive) if present. Accepted
/// label cells: 1 / -1 and Normal / Attack. The index column is
/// `config.index_column` when set, otherwise a column named "timestamp"; its
/// cells are kept verbatim and never scored.
///
/// Throws InvalidInput for a missing header, a ragged row or a cell that is
/// not a finite number (the message names line and column).
DataMatrix load_csv(const std::filesystem::path& path, const RunConfig& config = {});
DataMatrix read_csv(std::istream& in, const RunConfig& config = {});

/// Writes index column (if any), feature columns, then the label column as
/// 1 / -1 under `label_name`. Values use the shortest round-trip format.
void write_csv(const DataMatrix& x, const std::filesystem::path& path,
               const std::string& label_name = "label");
void write_csv(const DataMatrix& x, std::ostream& out, const std::string& label_name = "label");

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

Label parse_label(std::string_view cell);

}  // namespace tpd
