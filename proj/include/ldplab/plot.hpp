#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldplab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name, or -1.
  int column(const std::string& name) const;
};

/// Numeric CSV with a header line. "inf", "-inf" and "nan" are accepted.
/// Malformed input throws ConfigError keyed "csv".
CsvTable read_table(std::istream& in);

/// 640x400 SVG line plot. Convergence tables (eps, estimate, ci_lo, ci_hi,
/// limit) get a CI band and a dashed limit line; level tables (m, y_m) are
/// drawn against log2 m, taking the smallest y_m per level. Any other schema,
/// or no rows, throws ConfigError.
std::string render_svg(const CsvTable& table, const std::string& title);

/// Reads `csv_path` and writes the plot to `svg_path`.
void plot_csv(const std::string& csv_path, const std::string& svg_path);

}  // namespace ldplab
