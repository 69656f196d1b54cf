#include "hexcnn/cli/csv.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace hexcnn::cli {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double v) { return fmt::format("{}", v); }

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  emit(header);
}

void CsvWriter::emit(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw std::logic_error("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(columns_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

CsvWriter::Row& CsvWriter::Row::operator<<(std::string_view s) {
  fields_.emplace_back(s);
  return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(std::int64_t v) {
  fields_.push_back(std::to_string(v));
  return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(std::uint64_t v) {
  fields_.push_back(std::to_string(v));
  return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(double v) {
  fields_.push_back(format_number(v));
  return *this;
}

CsvWriter::Row::~Row() noexcept(false) { writer_.emit(fields_); }

}  // namespace hexcnn::cli
