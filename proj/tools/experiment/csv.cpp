#include "experiment/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace reloc::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string escape_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string join_header(const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out += ',';
    out += escape_field(header[k]);
  }
  return out;
}

std::string CsvTable::render() const {
  std::string out = join_header(header_);
  out += '\n';
  for (const Row& r : rows_) {
    if (r.fields_.size() != header_.size()) {
      throw std::logic_error("csv: row has " + std::to_string(r.fields_.size()) +
                             " fields, header has " + std::to_string(header_.size()));
    }
    for (std::size_t k = 0; k < r.fields_.size(); ++k) {
      if (k) out += ',';
      out += escape_field(r.fields_[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace reloc::cli
