#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reloc::cli {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// RFC 4180 quoting: fields with a comma, quote, CR or LF are quoted and
/// embedded quotes doubled.
std::string escape_field(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& add(double v) { return add_raw(format_double(v)); }
    Row& add(std::uint64_t v) { return add_raw(std::to_string(v)); }
    Row& add(unsigned v) { return add_raw(std::to_string(v)); }
    Row& add(int v) { return add_raw(std::to_string(v)); }
    Row& add(bool v) { return add_raw(v ? "true" : "false"); }
    Row& add(const std::string& v) { return add_raw(v); }
    Row& add(const char* v) { return add_raw(v); }
    Row& empty() { return add_raw(""); }

   private:
    friend class CsvTable;
    Row& add_raw(std::string v) {
      fields_.push_back(std::move(v));
      return *this;
    }
    std::vector<std::string> fields_;
  };

  Row& row() {
    rows_.emplace_back();
    return rows_.back();
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  /// Header plus rows, LF line endings. Throws std::logic_error on a row
  /// with the wrong number of fields.
  std::string render() const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

std::string join_header(const std::vector<std::string>& header);

}  // namespace reloc::cli
