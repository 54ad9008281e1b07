#ifndef GVARKIT_STRINGS_HPP_
#define GVARKIT_STRINGS_HPP_

#include <string>
#include <vector>

namespace gvarkit {

// Shortest decimal form that parses back to the identical double.
std::string format_full_double(double x);

// Fixed-point with the given number of decimals, e.g. format_fixed(3.14159, 2)
// == "3.14". Used for report tables.
std::string format_fixed(double x, int decimals);

std::vector<std::string> split_csv_line(const std::string& line);
std::string trim(const std::string& s);

// Strict double parse; throws DataError mentioning `context` on failure.
double parse_double(const std::string& text, const std::string& context);

// FNV-1a over a byte string, used for config fingerprints.
unsigned long long fnv1a(const std::string& bytes);

}  // namespace gvarkit

#endif  // GVARKIT_STRINGS_HPP_
