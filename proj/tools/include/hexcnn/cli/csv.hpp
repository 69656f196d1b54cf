#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hexcnn::cli {

/// Comma-separated output with RFC 4180 quoting. The header row is written
/// on construction; every row must have the same number of fields.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  class Row {
   public:
    Row& operator<<(std::string_view s);
    Row& operator<<(const char* s) { return *this << std::string_view(s); }
    Row& operator<<(const std::string& s) { return *this << std::string_view(s); }
    Row& operator<<(std::int64_t v);
    Row& operator<<(std::uint64_t v);
    Row& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
    Row& operator<<(double v);
    ~Row() noexcept(false);

   private:
    friend class CsvWriter;
    explicit Row(CsvWriter& w) : writer_(w) {}
    CsvWriter& writer_;
    std::vector<std::string> fields_;
  };

  Row row() { return Row(*this); }
  std::size_t columns() const noexcept { return columns_; }

 private:
  void emit(const std::vector<std::string>& fields);

  std::ostream& out_;
  std::size_t columns_;
};

/// Quotes a field if it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Shortest decimal that round-trips the double.
std::string format_number(double v);

}  // namespace hexcnn::cli
