#include "qotto/result_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace qotto {

std::string format_double(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

} // namespace

std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t u) const { return std::to_string(u); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return quote_csv(s); }
  };
  return std::visit(Visitor{}, cell);
}

ResultTable::ResultTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty())
    throw std::invalid_argument("a table needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument("row has " + std::to_string(row.size()) +
                                " cells, header has " +
                                std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name)
      return i;
  throw std::out_of_range("no column named " + std::string(name));
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    out += (i ? "," : "") + quote_csv(columns_[i]);
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + format_cell(row[i]);
    out += '\n';
  }
  return out;
}

void write_outputs(const std::filesystem::path& dir,
                   const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw OutputError(dir, "cannot create directory: " + ec.message());

  std::vector<std::pair<fs::path, fs::path>> staged;
  auto discard = [&] {
    std::error_code ignored;
    for (const auto& [tmp, final_path] : staged)
      fs::remove(tmp, ignored);
  };

  const std::string suffix = ".tmp" + std::to_string(::getpid());
  for (const auto& file : files) {
    const fs::path final_path = dir / file.name;
    fs::path tmp = final_path;
    tmp += suffix;
    staged.emplace_back(tmp, final_path);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out)
      out.write(file.content.data(),
                static_cast<std::streamsize>(file.content.size()));
    if (out)
      out.close();
    if (!out) {
      discard();
      throw OutputError(final_path, "write failed");
    }
  }
  for (std::size_t i = 0; i < staged.size(); ++i) {
    fs::rename(staged[i].first, staged[i].second, ec);
    if (ec) {
      std::error_code ignored;
      for (std::size_t j = i; j < staged.size(); ++j)
        fs::remove(staged[j].first, ignored);
      throw OutputError(staged[i].second, "rename failed: " + ec.message());
    }
  }
}

} // namespace qotto
