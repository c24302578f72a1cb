// Minimal strict TOML reader for experiment configuration files.
//
// Supported: comments, [table] and [dotted.table] headers, [[array.of.tables]],
// bare or quoted keys, basic and literal strings, integers, floats
// (including inf/nan), booleans, arrays (multi-line, trailing comma) and
// inline tables. Anything else (dates, dotted keys, multi-line strings,
// hex/octal/binary integers) is rejected with a line number.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qotto::toml {

class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

struct Value;
using Array = std::vector<Value>;

/// Key/value pairs in file order.
struct Table {
  std::vector<std::pair<std::string, Value>> entries;

  const Value* find(std::string_view key) const;
  Value* find(std::string_view key);
};

struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array, Table> data;
  int line = 0;

  bool is_table() const { return std::holds_alternative<Table>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  /// "string", "integer", ... for diagnostics.
  std::string_view type_name() const;
};

Table parse(std::string_view text);

} // namespace qotto::toml
