#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "slotforge/errors.hpp"
#include "slotforge/geometry.hpp"

// Minimal self-contained SVG line charts; no display or plotting dependency.

namespace slotforge::svg {

struct Series {
  std::string label;
  std::string color;
  const Spectrum* spectrum;
};

inline void write_overlay_chart(const std::vector<Series>& series,
                                const std::string& title, const std::string& path) {
  if (series.empty()) throw validation_error("svg: no series to plot");
  const int w = 900, h = 540;
  const int ml = 60, mr = 20, mt = 40, mb = 50;
  const double x0 = series[0].spectrum->grid.start_ghz;
  const double x1 = series[0].spectrum->grid.stop_ghz;
  const double y0 = -42.0, y1 = 2.0;

  auto px = [&](double f) { return ml + (f - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double v) { return mt + (y1 - v) / (y1 - y0) * (h - mt - mb); };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes + gridlines
  for (int g = 0; g >= -40; g -= 10) {
    out << "<line x1=\"" << ml << "\" y1=\"" << py(g) << "\" x2=\"" << w - mr
        << "\" y2=\"" << py(g) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(g) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << g << "</text>\n";
  }
  for (int f = static_cast<int>(x0); f <= static_cast<int>(x1); ++f) {
    out << "<line x1=\"" << px(f) << "\" y1=\"" << mt << "\" x2=\"" << px(f)
        << "\" y2=\"" << h - mb << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << px(f) << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << f << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
         "frequency (GHz)</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " << (mt + h - mb) / 2 << ")\">S11 (dB)</text>\n";

  int legend_y = mt + 16;
  for (const Series& s : series) {
    const Spectrum& sp = *s.spectrum;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < sp.grid.n_points; ++i)
      out << px(sp.grid.point(i)) << ',' << py(sp.s11_db[static_cast<size_t>(i)]) << ' ';
    out << "\"/>\n";
    out << "<line x1=\"" << w - mr - 150 << "\" y1=\"" << legend_y << "\" x2=\""
        << w - mr - 120 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << w - mr - 112 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace slotforge::svg
