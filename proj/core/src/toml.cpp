#include "toml.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <vector>

#include "wavedim/error.hpp"

namespace wavedim {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  nlohmann::json run() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        const std::vector<std::string> key = parse_key();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        nlohmann::json value = parse_value();
        nlohmann::json* target = table;
        for (std::size_t i = 0; i + 1 < key.size(); ++i) target = &child_table(*target, key[i]);
        if (target->contains(key.back())) fail("duplicate key '" + key.back() + "'");
        (*target)[key.back()] = std::move(value);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::set<std::string> opened_;

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("config line " + std::to_string(line_) + ": " + what);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }
  void skip_blank_lines() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        get();
        continue;
      }
      return;
    }
  }
  /// Whitespace, newlines and comments inside arrays.
  void skip_array_space() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        get();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') get();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    get();
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
  }

  std::string parse_key_part() {
    if (peek() == '"' || peek() == '\'') return parse_string();
    std::string out;
    while (!eof() && bare_char(peek())) out.push_back(get());
    if (out.empty()) fail("expected a key");
    return out;
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts;
    parts.push_back(parse_key_part());
    for (;;) {
      skip_inline_space();
      if (peek() != '.') break;
      get();
      skip_inline_space();
      parts.push_back(parse_key_part());
    }
    return parts;
  }

  nlohmann::json& child_table(nlohmann::json& parent, const std::string& name) {
    if (!parent.contains(name)) parent[name] = nlohmann::json::object();
    nlohmann::json& c = parent[name];
    if (!c.is_object()) fail("'" + name + "' is not a table");
    return c;
  }

  nlohmann::json& open_table(nlohmann::json& root) {
    expect('[');
    if (peek() == '[') fail("arrays of tables are not supported");
    skip_inline_space();
    const std::vector<std::string> key = parse_key();
    skip_inline_space();
    expect(']');
    std::string path;
    for (const std::string& part : key) path += part + '\x1f';
    if (!opened_.insert(path).second) fail("table defined twice");
    nlohmann::json* t = &root;
    for (const std::string& part : key) t = &child_table(*t, part);
    return *t;
  }

  std::string parse_string() {
    const char quote = get();
    if (peek() == quote && pos_ + 1 < s_.size() && s_[pos_ + 1] == quote) fail("multi-line strings are not supported");
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  nlohmann::json parse_number_or_bool() {
    std::string tok;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) tok.push_back(get());
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.empty()) fail("expected a value");
    std::string clean;
    for (char c : tok) {
      if (c != '_') clean.push_back(c);
    }
    const bool is_float = clean.find_first_of(".eE") != std::string::npos || clean == "inf" || clean == "+inf" ||
                          clean == "-inf" || clean == "nan";
    const char* first = clean.data() + (clean.front() == '+' ? 1 : 0);
    const char* last = clean.data() + clean.size();
    if (is_float) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail("malformed number '" + tok + "'");
      return v;
    }
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail("malformed value '" + tok + "'");
    return v;
  }

  nlohmann::json parse_array() {
    expect('[');
    nlohmann::json arr = nlohmann::json::array();
    for (;;) {
      skip_array_space();
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(parse_value());
      skip_array_space();
      if (peek() == ',') {
        get();
        continue;
      }
      skip_array_space();
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  nlohmann::json parse_value() {
    if (eof()) fail("missing value");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");
    return parse_number_or_bool();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return Parser(text).run(); }

}  // namespace wavedim
