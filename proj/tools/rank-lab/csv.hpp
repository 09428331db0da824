#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ranklab::cli {

/// Quotes a field when it contains a comma, quote, CR or LF; embedded quotes
/// are doubled.
std::string csv_field(std::string_view text);

/// Shortest text that reads back to the same double (%.17g); empty for NaN.
std::string number(double v);
std::string number(std::int64_t v);

class CsvWriter {
public:
  CsvWriter(const std::string& path, std::initializer_list<std::string_view> header);
  void row(const std::vector<std::string>& fields);
  void close();

private:
  std::ofstream out_;
  std::string path_;
  std::size_t width_;
};

} // namespace ranklab::cli
