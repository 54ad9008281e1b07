#ifndef GVARKIT_SVG_HPP_
#define GVARKIT_SVG_HPP_

#include <string>
#include <vector>

namespace gvarkit {

// One chart panel: five quantile tracks over consecutive steps. x_start is
// the label of the first step (forecast fans start at horizon 1, impulse
// responses at 0).
struct ChartPanel {
  std::string label;
  int x_start = 1;
  std::vector<double> lo_outer;  // 5%
  std::vector<double> lo_inner;  // 16%
  std::vector<double> median;    // 50%
  std::vector<double> hi_inner;  // 84%
  std::vector<double> hi_outer;  // 95%
};

// Deterministic multi-panel fan chart. Bands are drawn as translucent
// polygons (outer 90% interval, inner 68%) under the median line; a band
// whose width is exactly zero at every step is omitted entirely, so a
// degenerate fan renders byte-identically to a plain line chart. meta goes
// into <desc>, never into timestamps or ids.
struct FanChart {
  std::string title;
  std::string meta;
  std::vector<ChartPanel> panels;

  std::string to_svg() const;
  void save(const std::string& path) const;
};

}  // namespace gvarkit

#endif  // GVARKIT_SVG_HPP_
