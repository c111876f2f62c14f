#pragma once

#include <istream>
#include <string>
#include <vector>

namespace bankembed {

// Streaming RFC-4180 CSV reader. Handles quoted fields with embedded commas,
// doubled quotes, and newlines; accepts LF and CRLF endings. Malformed
// records are reported instead of thrown so the caller can skip and
// continue over dirty rows.
class CsvReader {
 public:
  enum class Result { row, bad_row, eof };

  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record into `fields`. On bad_row, `error` describes the
  // problem and the reader has resynchronized at the next line.
  Result next(std::vector<std::string>* fields, std::string* error);

  // 1-based line number where the most recent record started.
  std::size_t record_line() const { return record_line_; }

 private:
  int get();
  void skip_to_line_end();

  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

}  // namespace bankembed
