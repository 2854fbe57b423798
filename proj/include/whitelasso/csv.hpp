#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace whitelasso {

// Shortest round-trip decimal; "NA" for NaN.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name, or -1.
  int column(const std::string& name) const;
  // Numeric column; "NA" becomes NaN. Throws std::invalid_argument on bad cells.
  std::vector<double> numeric(const std::string& name) const;
};

// Comma-separated with a mandatory header row. No quoting. Blank lines and a
// trailing '\r' on each line are ignored.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

double parse_double(const std::string& text);

}  // namespace whitelasso
