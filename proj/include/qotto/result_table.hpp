// Tabular results and their CSV / file serialization.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qotto {

using Cell = std::variant<double, std::int64_t, std::uint64_t, bool, std::string>;

/// Shortest text that reads back to the same double: 17 significant digits,
/// trailing zeros dropped, '.' separator regardless of locale. Non-finite
/// values print as nan, inf, -inf.
std::string format_double(double value);
std::string format_cell(const Cell& cell);

class ResultTable {
public:
  explicit ResultTable(std::vector<std::string> columns);

  /// Throws std::invalid_argument if the row length differs from the header.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t column_index(std::string_view name) const;

  /// Header line plus one line per row, LF terminated.
  std::string to_csv() const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

class OutputError : public std::runtime_error {
public:
  OutputError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

struct OutputFile {
  std::string name; // relative to the output directory
  std::string content;
};

/// Writes every file to a temporary sibling first and renames them into
/// place only once all writes succeeded, so a failure never leaves a
/// truncated file under a final name. Creates `dir` if needed.
void write_outputs(const std::filesystem::path& dir,
                   const std::vector<OutputFile>& files);

} // namespace qotto
