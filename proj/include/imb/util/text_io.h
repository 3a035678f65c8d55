#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imb {

// Locale-independent shortest representation that parses back exactly.
std::string FormatDouble(double value);
void AppendDouble(std::string* out, double value);

std::optional<double> ParseDouble(std::string_view token);
std::optional<int64_t> ParseInt(std::string_view token);

// Splits on spaces/tabs; empty tokens are dropped.
std::vector<std::string_view> SplitFields(std::string_view line);

// Iterates '\n'-terminated lines, tracking 1-based line numbers. A trailing
// '\r' is treated as malformed by the format parsers, not stripped here.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool Next(std::string_view* line);
  int line_number() const { return line_number_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_number_ = 0;
};

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::string_view bytes);

}  // namespace imb
