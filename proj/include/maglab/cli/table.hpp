#pragma once

#include <string>
#include <vector>

#include "maglab/error.hpp"

namespace maglab::cli {

/// Rows of named numeric columns. Metadata lives in a separate JSON document.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  ///< MissingColumn if absent
  void add_row(std::vector<double> row);
};

/// Header plus one line per row, shortest round-trip decimals, '\n' endings.
std::string to_csv(const ResultTable& t);

/// Line chart of y_cols against x_col; log-scale x when x is a positive
/// geometric progression. Byte-identical for identical input.
std::string emit_svg(const ResultTable& t, const std::string& x_col, const std::vector<std::string>& y_cols);

/// Writes via a temporary file in the same directory and renames it into place.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace maglab::cli
