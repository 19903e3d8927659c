#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace polarnet::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "".
std::vector<std::string> split(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Splits content into lines, dropping '\r' and the final empty line.
std::vector<std::string_view> lines(std::string_view content);

/// Shortest round-trip representation; empty for NaN.
std::string number(double value);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  void header(std::initializer_list<std::string_view> columns);
  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (write_field(fields, first), ...);
    out_ << '\n';
  }

 private:
  void write_field(std::string_view value, bool& first);
  void write_field(const std::string& value, bool& first) { write_field(std::string_view(value), first); }
  void write_field(const char* value, bool& first) { write_field(std::string_view(value), first); }
  void write_field(double value, bool& first);
  template <class Int>
    requires std::is_integral_v<Int>
  void write_field(Int value, bool& first) {
    write_field(std::string_view(std::to_string(value)), first);
  }
  std::ofstream out_;
};

}  // namespace polarnet::csv
