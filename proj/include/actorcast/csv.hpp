#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actorcast::csv {

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  /// 1-based physical line on which the last returned record started.
  size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  size_t line_ = 1;
  size_t record_line_ = 0;
  bool first_ = true;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);

/// Shortest decimal representation that parses back to the identical double.
std::string format_double(double value);
/// Strict parse of a whole field; throws std::invalid_argument on garbage.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

/// Reads an entire file with a header; `header` receives the first record.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws std::runtime_error if absent.
  size_t column(std::string_view name) const;
};

Table read_table(std::istream& in);
Table read_table_file(const std::string& path);

}  // namespace actorcast::csv
