#pragma once

#include <string>
#include <vector>

namespace kfield::io {

// Shortest-round-trip decimal with 17 significant digits, '.' separator,
// independent of the global locale. All CSV artifacts go through this so
// reruns are byte-identical.
std::string format_double(double v);

struct CsvWriter {
  explicit CsvWriter(std::string header);

  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return buffer_; }
  void write_file(const std::string& path) const;

 private:
  std::string buffer_;
  size_t columns_ = 0;
};

}  // namespace kfield::io
