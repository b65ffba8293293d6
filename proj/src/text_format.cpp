#include "jjwash/text_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "jjwash/error.hpp"

namespace jjwash::text {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(int line, int column, const std::string& what) {
  throw Error(ErrorKind::parse_error, std::to_string(line) + ":" +
                                          std::to_string(column) + ": " +
                                          what);
}

// Recursive-descent evaluator over a single expression string.
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int line, int column)
      : text_(text), line_(line), column_(column) {}

  double parse() {
    const double v = expression();
    skip_space();
    if (pos_ != text_.size()) {
      error("unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return v;
  }

 private:
  double expression() {
    double v = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      skip_space();
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0.0) error("division by zero");
        v /= d;
      } else if (peek_word("pi") || peek_word("sqrt") || peek('(')) {
        v *= unary();  // implicit product, e.g. 2pi
      } else {
        return v;
      }
    }
  }

  double unary() {
    skip_space();
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  double primary() {
    skip_space();
    if (accept('(')) {
      const double v = expression();
      expect(')');
      return v;
    }
    if (accept_word("pi")) return std::numbers::pi;
    if (accept_word("sqrt")) {
      expect('(');
      const double v = expression();
      expect(')');
      if (v < 0.0) error("sqrt of negative value");
      return std::sqrt(v);
    }
    return number();
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
    }
    if (start == pos_) {
      if (pos_ >= text_.size()) error("expected a number");
      error("expected a number at '" + std::string(1, text_[pos_]) + "'");
    }
    const std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) error("malformed number '" + token + "'");
    return v;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  bool peek_word(std::string_view w) {
    skip_space();
    return text_.substr(pos_, w.size()) == w;
  }
  bool accept_word(std::string_view w) {
    if (peek_word(w)) {
      pos_ += w.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& what) const {
    fail(line_, column_ + static_cast<int>(pos_), what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int column_;
};

}  // namespace

const Entry* Document::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

Document parse_document(std::string_view text) {
  Document doc;
  Entry* open_block = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (open_block != nullptr) {
      if (line == "end") {
        if (open_block->rows.empty()) {
          fail(line_no, 1, "empty block '" + open_block->key + "'");
        }
        open_block = nullptr;
        continue;
      }
      open_block->rows.push_back(split_list(line));
      continue;
    }

    const auto eq = line.find('=');
    const int indent = static_cast<int>(line.data() - raw.data());
    if (eq == std::string_view::npos) {
      fail(line_no, indent + 1, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, indent + 1, "missing key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
        fail(line_no, indent + 1, "invalid key '" + std::string(key) + "'");
      }
    }
    if (doc.find(key) != nullptr) {
      fail(line_no, indent + 1, "duplicate key '" + std::string(key) + "'");
    }
    const std::string_view rest = line.substr(eq + 1);
    const std::string_view value = trim(rest);

    Entry entry;
    entry.key = std::string(key);
    entry.line = line_no;
    if (value.empty()) {
      entry.is_block = true;
      entry.column = indent + 1;
      doc.entries.push_back(std::move(entry));
      open_block = &doc.entries.back();
    } else {
      entry.value = std::string(value);
      entry.column = static_cast<int>(value.data() - raw.data()) + 1;
      doc.entries.push_back(std::move(entry));
    }
  }
  if (open_block != nullptr) {
    fail(line_no, 1, "block '" + open_block->key + "' is missing 'end'");
  }
  return doc;
}

double parse_real(std::string_view text, int line, int column) {
  return ExpressionParser(text, line, column).parse();
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    const bool sep = depth == 0 &&
                     (c == ',' || std::isspace(static_cast<unsigned char>(c)));
    if (sep) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<double> parse_real_list(std::string_view text, int line,
                                    int column) {
  std::vector<double> values;
  for (const auto& token : split_list(text)) {
    values.push_back(parse_real(token, line, column));
  }
  return values;
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace jjwash::text
