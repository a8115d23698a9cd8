#include "navobs/csv.hpp"

#include <array>
#include <charconv>
#include <sstream>

#include "navobs/errors.hpp"

namespace navobs::csv {

std::string format(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view field) {
  double x = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw InvalidArgument("csv: cannot parse number '" + std::string(field) + "'");
  }
  return x;
}

long long parse_int(std::string_view field) {
  long long x = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw InvalidArgument("csv: cannot parse integer '" + std::string(field) + "'");
  }
  return x;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) {
    throw InvalidArgument("csv: cannot open '" + path.string() + "' for writing");
  }
  for (const auto& h : header) {
    *this << std::string_view(h);
  }
  end_row();
}

void Writer::separator() {
  if (filled_ > 0) {
    row_ += ',';
  }
  ++filled_;
}

Writer& Writer::operator<<(double x) {
  separator();
  row_ += format(x);
  return *this;
}

Writer& Writer::operator<<(long long x) {
  separator();
  row_ += std::to_string(x);
  return *this;
}

Writer& Writer::operator<<(std::string_view s) {
  separator();
  row_ += s;
  return *this;
}

void Writer::end_row() {
  if (filled_ != columns_) {
    throw InvalidArgument("csv: row has " + std::to_string(filled_) + " fields, expected " +
                          std::to_string(columns_));
  }
  row_ += '\n';
  out_ << row_;
  row_.clear();
  filled_ = 0;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw InvalidArgument("csv: missing column '" + std::string(name) + "'");
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("csv: cannot open '" + path.string() + "'");
  }
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    for (auto f : split(line)) {
      fields.emplace_back(f);
    }
    if (first) {
      t.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw InvalidArgument("csv: ragged row in '" + path.string() + "'");
    }
    t.rows.push_back(std::move(fields));
  }
  if (first) {
    throw InvalidArgument("csv: '" + path.string() + "' has no header");
  }
  return t;
}

}  // namespace navobs::csv
