#include "gvarkit/table.hpp"

#include <cmath>
#include <fstream>

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"

namespace gvarkit {

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string cell = header[i];
    if (i == 0 && !meta.empty()) cell += " [" + meta + "]";
    if (i > 0) out += ',';
    out += csv_escape(cell);
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw DataError("table row has " + std::to_string(row.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

void Table::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << to_csv();
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string significance_stars(double pvalue) {
  if (!std::isfinite(pvalue)) return "";
  if (pvalue <= 0.01) return "***";
  if (pvalue <= 0.05) return "**";
  if (pvalue <= 0.10) return "*";
  return "";
}

std::string percent_string(long count, long total) {
  if (total <= 0) throw DataError("percent_string needs a positive total");
  std::string s = format_fixed(100.0 * static_cast<double>(count) / total, 2);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string table_number(double v) {
  if (!std::isfinite(v)) return "";
  return format_fixed(v, 4);
}

}  // namespace gvarkit
