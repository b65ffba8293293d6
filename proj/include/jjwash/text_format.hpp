#pragma once

// Plain-text key/value documents shared by cell files and run specs.
//
//   # comment
//   key = value
//   matrix =
//     -1  0  1  0
//      0 -1  0  1
//   end
//
// Numeric fields accept small real expressions: 0.5, -1/2, 2*pi/3, 2pi,
// 1/sqrt(3), (pi+1)/2.

#include <string>
#include <string_view>
#include <vector>

namespace jjwash::text {

struct Entry {
  std::string key;
  std::string value;                           // empty for blocks
  std::vector<std::vector<std::string>> rows;  // block rows, whitespace-split
  bool is_block = false;
  int line = 0;
  int column = 0;  // 1-based column of the value (or key for blocks)
};

struct Document {
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const;
};

/// Throws Error(parse_error) with "line:column" in the message.
Document parse_document(std::string_view text);

/// Evaluates a real-valued expression. `line`/`column` only decorate errors.
double parse_real(std::string_view text, int line = 0, int column = 0);

/// Whitespace- or comma-separated list of expressions.
std::vector<double> parse_real_list(std::string_view text, int line = 0,
                                    int column = 0);

std::vector<std::string> split_list(std::string_view text);

/// Shortest decimal text that round-trips, via %.17g.
std::string format_real(double value);

}  // namespace jjwash::text
