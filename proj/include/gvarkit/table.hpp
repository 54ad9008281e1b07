#ifndef GVARKIT_TABLE_HPP_
#define GVARKIT_TABLE_HPP_

#include <string>
#include <vector>

namespace gvarkit {

// Rectangular text table written as CSV. The first header cell is the corner
// label; when meta is set it is appended there in brackets so provenance
// never adds a line to the file.
struct Table {
  std::string meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  void save(const std::string& path) const;
};

// "***" at the 1% level, "**" at 5%, "*" at 10%, empty otherwise (and for
// non-finite p-values).
std::string significance_stars(double pvalue);

// 100*count/total rendered with at most two decimals and no trailing zeros:
// 280/1680 -> "16.67", 31/40 -> "77.5", 4/40 -> "10".
std::string percent_string(long count, long total);

// Default numeric cell rendering: fixed four decimals, NaN as empty text.
std::string table_number(double v);

}  // namespace gvarkit

#endif  // GVARKIT_TABLE_HPP_
