#include "qotto/toml_lite.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace qotto::toml {

const Value* Table::find(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key)
      return &v;
  return nullptr;
}

Value* Table::find(std::string_view key) {
  for (auto& [k, v] : entries)
    if (k == key)
      return &v;
  return nullptr;
}

std::string_view Value::type_name() const {
  switch (data.index()) {
  case 0: return "string";
  case 1: return "integer";
  case 2: return "float";
  case 3: return "boolean";
  case 4: return "array";
  default: return "table";
  }
}

namespace {

bool is_bare_key_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-';
}

void append_utf8(std::string& out, std::uint32_t cp, int line) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    throw ParseError(line, "invalid unicode escape");
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_blank_lines();
      if (at_end())
        break;
      if (peek() == '[') {
        current = &header(root);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> defined_tables_;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, message);
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t'))
      ++pos_;
  }

  void skip_comment() {
    if (peek() != '#')
      return;
    while (!at_end() && peek() != '\n')
      ++pos_;
  }

  bool newline() {
    if (peek() == '\r' && peek(1) == '\n') {
      pos_ += 2;
    } else if (peek() == '\n') {
      ++pos_;
    } else {
      return false;
    }
    ++line_;
    return true;
  }

  void skip_blank_lines() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (!newline())
        return;
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (!newline())
        return;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (!at_end() && !newline())
      fail(std::string("unexpected character '") + peek() + "' after value");
  }

  std::string key() {
    skip_spaces();
    std::string out;
    if (peek() == '"') {
      out = basic_string();
    } else if (peek() == '\'') {
      out = literal_string();
    } else {
      while (!at_end() && is_bare_key_char(peek()))
        out += text_[pos_++];
      if (out.empty())
        fail("expected a key");
    }
    skip_spaces();
    return out;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{key()};
    while (peek() == '.') {
      ++pos_;
      parts.push_back(key());
    }
    return parts;
  }

  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts)
      out += (out.empty() ? "" : ".") + p;
    return out;
  }

  // Walks to (creating) the table at `parts`, descending into the last
  // element of arrays of tables on the way.
  Table& descend(Table& root, const std::vector<std::string>& parts,
                 std::size_t count) {
    Table* t = &root;
    for (std::size_t i = 0; i < count; ++i) {
      Value* v = t->find(parts[i]);
      if (!v) {
        t->entries.emplace_back(parts[i], Value{Table{}, line_});
        v = &t->entries.back().second;
      }
      if (auto* sub = std::get_if<Table>(&v->data)) {
        t = sub;
      } else if (auto* arr = std::get_if<Array>(&v->data);
                 arr && !arr->empty() && arr->back().is_table()) {
        t = &std::get<Table>(arr->back().data);
      } else {
        fail("key '" + parts[i] + "' is already defined as a " +
             std::string(v->type_name()));
      }
    }
    return *t;
  }

  Table& header(Table& root) {
    ++pos_;
    const bool array_of_tables = peek() == '[';
    if (array_of_tables)
      ++pos_;
    const std::vector<std::string> parts = dotted_key();
    if (peek() != ']' || (array_of_tables && peek(1) != ']'))
      fail("malformed table header");
    pos_ += array_of_tables ? 2 : 1;

    const std::string name = join(parts);
    if (!array_of_tables) {
      if (!defined_tables_.insert(name).second)
        fail("table [" + name + "] defined twice");
      return descend(root, parts, parts.size());
    }

    Table& parent = descend(root, parts, parts.size() - 1);
    Value* v = parent.find(parts.back());
    if (!v) {
      parent.entries.emplace_back(parts.back(), Value{Array{}, line_});
      v = &parent.entries.back().second;
    }
    auto* arr = std::get_if<Array>(&v->data);
    if (!arr)
      fail("[[" + name + "]] conflicts with an existing " +
           std::string(v->type_name()));
    arr->push_back(Value{Table{}, line_});
    return std::get<Table>(arr->back().data);
  }

  void key_value(Table& table) {
    const int line = line_;
    const std::vector<std::string> parts = dotted_key();
    if (parts.size() != 1)
      fail("dotted keys are not supported: " + join(parts));
    if (peek() != '=')
      fail("expected '=' after key '" + parts[0] + "'");
    ++pos_;
    skip_spaces();
    Value v = value();
    v.line = line;
    if (table.find(parts[0]))
      fail("duplicate key '" + parts[0] + "'");
    table.entries.emplace_back(parts[0], std::move(v));
  }

  Value value() {
    const int line = line_;
    const char c = peek();
    if (c == '"')
      return {basic_string(), line};
    if (c == '\'')
      return {literal_string(), line};
    if (c == '[')
      return {array(), line};
    if (c == '{')
      return {inline_table(), line};
    if (text_.substr(pos_, 4) == "true" && !is_bare_key_char(peek(4))) {
      pos_ += 4;
      return {true, line};
    }
    if (text_.substr(pos_, 5) == "false" && !is_bare_key_char(peek(5))) {
      pos_ += 5;
      return {false, line};
    }
    return number();
  }

  std::string basic_string() {
    if (text_.substr(pos_, 3) == "\"\"\"")
      fail("multi-line strings are not supported");
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n')
        fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"')
        return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      const char e = text_[pos_++];
      switch (e) {
      case 'b': out += '\b'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'f': out += '\f'; break;
      case 'r': out += '\r'; break;
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case 'u':
      case 'U': {
        const std::size_t len = e == 'u' ? 4 : 8;
        std::uint32_t cp = 0;
        const auto hex = text_.substr(pos_, len);
        const auto [end, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
        if (ec != std::errc{} || hex.size() != len || end != hex.data() + len)
          fail("malformed unicode escape");
        pos_ += len;
        append_utf8(out, cp, line_);
        break;
      }
      default:
        fail(std::string("invalid escape '\\") + e + "'");
      }
    }
  }

  std::string literal_string() {
    if (text_.substr(pos_, 3) == "'''")
      fail("multi-line strings are not supported");
    ++pos_;
    const std::size_t close = text_.find_first_of("'\n", pos_);
    if (close == std::string_view::npos || text_[close] != '\'')
      fail("unterminated string");
    std::string out(text_.substr(pos_, close - pos_));
    pos_ = close + 1;
    return out;
  }

  Array array() {
    ++pos_;
    Array out;
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  Table inline_table() {
    ++pos_;
    Table out;
    skip_spaces();
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      key_value(out);
      skip_spaces();
      if (peek() == '}') {
        ++pos_;
        return out;
      }
      if (peek() != ',')
        fail("expected ',' or '}' in inline table");
      ++pos_;
    }
  }

  Value number() {
    const int line = line_;
    std::string token;
    while (!at_end() && (is_bare_key_char(peek()) || peek() == '.' ||
                         peek() == '+' || peek() == ':'))
      token += text_[pos_++];
    if (token.empty())
      fail("expected a value");

    std::string body = token;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf")
      return {negative ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity(), line};
    if (body == "nan")
      return {std::numeric_limits<double>::quiet_NaN(), line};

    // underscores must sit between digits
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] != '_')
        continue;
      const bool ok = i > 0 && i + 1 < body.size() &&
                      std::isdigit(static_cast<unsigned char>(body[i - 1])) &&
                      std::isdigit(static_cast<unsigned char>(body[i + 1]));
      if (!ok)
        fail("malformed number '" + token + "'");
    }
    std::erase(body, '_');
    if (body.empty() || !std::isdigit(static_cast<unsigned char>(body[0])))
      fail("invalid value '" + token + "'");

    const bool is_float = body.find_first_of(".eE") != std::string::npos;
    if (body.size() > 1 && body[0] == '0' && std::isdigit(static_cast<unsigned char>(body[1])))
      fail("leading zeros are not allowed: '" + token + "'");
    if (is_float) {
      const std::size_t dot = body.find('.');
      if (dot != std::string::npos &&
          (dot + 1 >= body.size() || !std::isdigit(static_cast<unsigned char>(body[dot + 1]))))
        fail("malformed float '" + token + "'");
      const std::string signed_body = (negative ? "-" : "") + body;
      double d = 0.0;
      const auto [end, ec] =
          std::from_chars(signed_body.data(), signed_body.data() + signed_body.size(), d);
      if (ec != std::errc{} || end != signed_body.data() + signed_body.size())
        fail("malformed float '" + token + "'");
      return {d, line};
    }
    const std::string signed_body = (negative ? "-" : "") + body;
    std::int64_t i = 0;
    const auto [end, ec] =
        std::from_chars(signed_body.data(), signed_body.data() + signed_body.size(), i);
    if (ec == std::errc::result_out_of_range)
      fail("integer out of range '" + token + "'");
    if (ec != std::errc{} || end != signed_body.data() + signed_body.size())
      fail("unsupported value '" + token + "'");
    return {i, line};
  }
};

} // namespace

Table parse(std::string_view text) { return Parser(text).run(); }

} // namespace qotto::toml
