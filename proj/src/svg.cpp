#include "gvarkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"

namespace gvarkit {

namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 220.0;
constexpr double kMarginL = 52.0;
constexpr double kMarginR = 12.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 34.0;
constexpr double kTitleBand = 28.0;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) { return format_fixed(v, 2); }

struct Scale {
  double x0, x1, y0, y1;  // pixel box
  double vx0, vx1, vy0, vy1;  // value box
  double px(double v) const { return x0 + (v - vx0) / (vx1 - vx0) * (x1 - x0); }
  double py(double v) const { return y1 - (v - vy0) / (vy1 - vy0) * (y1 - y0); }
};

std::string polyline(const Scale& sc, int x_start, const std::vector<double>& ys,
                     const char* style) {
  std::string out = "<polyline fill=\"none\" ";
  out += style;
  out += " points=\"";
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (i > 0) out += ' ';
    out += num(sc.px(x_start + static_cast<double>(i))) + "," + num(sc.py(ys[i]));
  }
  out += "\"/>\n";
  return out;
}

std::string band_polygon(const Scale& sc, int x_start, const std::vector<double>& lo,
                         const std::vector<double>& hi, const char* fill) {
  std::string out = "<polygon stroke=\"none\" fill=\"";
  out += fill;
  out += "\" points=\"";
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (i > 0) out += ' ';
    out += num(sc.px(x_start + static_cast<double>(i))) + "," + num(sc.py(hi[i]));
  }
  for (std::size_t i = lo.size(); i-- > 0;) {
    out += ' ';
    out += num(sc.px(x_start + static_cast<double>(i))) + "," + num(sc.py(lo[i]));
  }
  out += "\"/>\n";
  return out;
}

bool zero_width(const std::vector<double>& lo, const std::vector<double>& hi) {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] != hi[i]) return false;
  }
  return true;
}

}  // namespace

std::string FanChart::to_svg() const {
  if (panels.empty()) throw DataError("chart has no panels");
  for (const auto& p : panels) {
    const std::size_t n = p.median.size();
    if (n < 2) throw DataError("chart panel '" + p.label + "' needs at least two steps");
    if (p.lo_outer.size() != n || p.lo_inner.size() != n || p.hi_inner.size() != n ||
        p.hi_outer.size() != n) {
      throw DataError("chart panel '" + p.label + "' has mismatched track lengths");
    }
  }

  const int n_panels = static_cast<int>(panels.size());
  const int ncols = n_panels <= 2 ? n_panels : (n_panels <= 6 ? 2 : 3);
  const int nrows = (n_panels + ncols - 1) / ncols;
  const double width = ncols * kPanelW;
  const double height = kTitleBand + nrows * kPanelH;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<desc>" + xml_escape(meta) + "</desc>\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + num(width / 2) +
         "\" y=\"19\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "font-weight=\"bold\">" +
         xml_escape(title) + "</text>\n";

  for (int idx = 0; idx < n_panels; ++idx) {
    const ChartPanel& p = panels[idx];
    const double ox = (idx % ncols) * kPanelW;
    const double oy = kTitleBand + (idx / ncols) * kPanelH;

    double vmin = p.lo_outer[0];
    double vmax = p.hi_outer[0];
    bool finite = true;
    for (std::size_t i = 0; i < p.median.size(); ++i) {
      // min/max never select NaN, so track finiteness explicitly.
      finite = finite && std::isfinite(p.lo_outer[i]) && std::isfinite(p.lo_inner[i]) &&
               std::isfinite(p.median[i]) && std::isfinite(p.hi_inner[i]) &&
               std::isfinite(p.hi_outer[i]);
      vmin = std::min({vmin, p.lo_outer[i], p.median[i]});
      vmax = std::max({vmax, p.hi_outer[i], p.median[i]});
    }
    if (!finite || !std::isfinite(vmin) || !std::isfinite(vmax)) {
      throw DataError("chart panel '" + p.label + "' has non-finite values");
    }
    double pad = (vmax - vmin) * 0.08;
    if (pad == 0.0) pad = std::max(1.0, std::fabs(vmax)) * 0.08;
    vmin -= pad;
    vmax += pad;

    Scale sc{ox + kMarginL, ox + kPanelW - kMarginR, oy + kMarginT, oy + kPanelH - kMarginB,
             static_cast<double>(p.x_start),
             static_cast<double>(p.x_start) + static_cast<double>(p.median.size() - 1),
             vmin, vmax};

    out += "<text x=\"" + num(ox + kPanelW / 2) + "\" y=\"" + num(oy + kMarginT - 8) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           xml_escape(p.label) + "</text>\n";
    out += "<rect x=\"" + num(sc.x0) + "\" y=\"" + num(sc.y0) + "\" width=\"" +
           num(sc.x1 - sc.x0) + "\" height=\"" + num(sc.y1 - sc.y0) +
           "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    if (vmin < 0.0 && vmax > 0.0) {
      out += "<line x1=\"" + num(sc.x0) + "\" y1=\"" + num(sc.py(0.0)) + "\" x2=\"" + num(sc.x1) +
             "\" y2=\"" + num(sc.py(0.0)) +
             "\" stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"3,3\"/>\n";
    }
    if (!zero_width(p.lo_outer, p.hi_outer)) {
      out += band_polygon(sc, p.x_start, p.lo_outer, p.hi_outer, "#c6dbef");
    }
    if (!zero_width(p.lo_inner, p.hi_inner)) {
      out += band_polygon(sc, p.x_start, p.lo_inner, p.hi_inner, "#6baed6");
    }
    out += polyline(sc, p.x_start, p.median, "stroke=\"#08519c\" stroke-width=\"1.5\"");

    for (std::size_t i = 0; i < p.median.size(); ++i) {
      const double x = sc.px(p.x_start + static_cast<double>(i));
      out += "<text x=\"" + num(x) + "\" y=\"" + num(sc.y1 + 16) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
             std::to_string(p.x_start + static_cast<int>(i)) + "</text>\n";
    }
    out += "<text x=\"" + num(sc.x0 - 6) + "\" y=\"" + num(sc.y1 + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
           format_fixed(vmin, 3) + "</text>\n";
    out += "<text x=\"" + num(sc.x0 - 6) + "\" y=\"" + num(sc.y0 + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
           format_fixed(vmax, 3) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void FanChart::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << to_svg();
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace gvarkit
