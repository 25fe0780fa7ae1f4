#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace helmetkit {

/// Malformed text input; carries the 1-based source line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace text {

/// Splits on commas and whitespace, dropping empty tokens.
std::vector<std::string_view> split_fields(std::string_view line);

/// Calls fn(line_number, line) for every non-blank line (CR stripped).
template <typename Fn>
void for_each_line(std::string_view body, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line_no, line);
    start = end + 1;
  }
}

std::optional<std::int64_t> parse_int(std::string_view token);
std::optional<double> parse_real(std::string_view token);

/// Shortest decimal that parses back to the same double; integral values bare.
std::string format_real(double v);

/// Fixed 6 decimals with trailing zeros (and a trailing '.') removed.
std::string format_confidence(double v);

std::string read_file(const std::string& path);

}  // namespace text
}  // namespace helmetkit
