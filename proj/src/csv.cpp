#include "polarnet/csv.hpp"

#include <fmt/format.h>

#include <cmath>

#include "polarnet/error.hpp"

namespace polarnet::csv {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string_view> lines(std::string_view content) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = end + 1;
  }
  return out;
}

std::string number(double value) {
  if (std::isnan(value)) return {};
  return fmt::format("{}", value);
}

Writer::Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw ConfigError("cannot write " + path.string());
}

void Writer::header(std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto c : columns) write_field(c, first);
  out_ << '\n';
}

void Writer::write_field(std::string_view value, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << escape(value);
}

void Writer::write_field(double value, bool& first) { write_field(std::string_view(number(value)), first); }

}  // namespace polarnet::csv
