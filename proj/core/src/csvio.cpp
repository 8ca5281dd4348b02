#include "kfield/csvio.hpp"

#include <cstdio>
#include <fstream>

#include "kfield/errors.hpp"

namespace kfield::io {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::string header) {
  columns_ = 1;
  for (char ch : header)
    if (ch == ',') ++columns_;
  buffer_ = std::move(header);
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("csv row width does not match header");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << buffer_;
}

}  // namespace kfield::io
