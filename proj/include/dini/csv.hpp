#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace dini {

/// Fixed 17-significant-digit rendering, so a double survives a text round trip.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// In-memory CSV document: an optional leading comment line, a header row and
/// string rows.
struct CsvTable {
  std::string comment;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const {
    if (!comment.empty()) out << "# " << comment << '\n';
    write_row(out, header);
    for (const auto& row : rows) write_row(out, row);
  }

  std::string str() const;

 private:
  static void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
};

/// Parses the format written by CsvTable::write (no quoting).
CsvTable parse_csv(const std::string& text);

}  // namespace dini
