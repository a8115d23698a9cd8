#ifndef NAVOBS_CSV_HPP
#define NAVOBS_CSV_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace navobs::csv {

/// Shortest representation that round-trips exactly ('.' decimal separator,
/// locale independent).
std::string format(double x);

/// Strict parse of a whole field; throws InvalidArgument.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

/// Splits one line on ','. Fields are never quoted in files this library
/// writes.
std::vector<std::string_view> split(std::string_view line);

/// Header-checked, row-at-a-time writer. Rows are terminated with "\n".
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

  Writer& operator<<(double x);
  Writer& operator<<(long long x);
  Writer& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
  Writer& operator<<(int x) { return *this << static_cast<long long>(x); }
  Writer& operator<<(std::string_view s);
  /// Ends the row; throws InvalidArgument if the column count is wrong.
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string row_;
};

/// Whole-file reader: header names plus rows of raw fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws InvalidArgument if missing.
  std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

}  // namespace navobs::csv

#endif  // NAVOBS_CSV_HPP
