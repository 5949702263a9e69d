#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace drsplit::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// viridis-like ramp between dark blue and yellow
std::string color(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double r = 68 + t * (253 - 68);
  const double g = 1 + t * (231 - 1);
  const double b = 84 + t * (37 - 84);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r), static_cast<int>(g),
                static_cast<int>(b));
  return buf;
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const Series& series) {
  const double w = 640, h = 420, left = 80, right = 20, top = 40, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  const std::size_t n = std::min(series.x.size(), series.y.size());

  bool log_y = n > 0;
  for (std::size_t i = 0; i < n; ++i) log_y = log_y && series.y[i] > 0.0;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (n > 0) {
    x0 = x1 = series.x[0];
    y0 = y1 = ty(series.y[0]);
    for (std::size_t i = 0; i < n; ++i) {
      x0 = std::min(x0, series.x[i]);
      x1 = std::max(x1, series.x[i]);
      y0 = std::min(y0, ty(series.y[i]));
      y1 = std::max(y1, ty(series.y[i]));
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    const double gx = left + pw * i / 4.0;
    const double gy = top + ph - ph * i / 4.0;
    s << "<text x=\"" << num(gx) << "\" y=\"" << num(top + ph + 18)
      << "\" text-anchor=\"middle\">" << label(fx) << "</text>\n";
    s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\">"
      << (log_y ? label(std::pow(10.0, fy)) : label(fy)) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 16 << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << top + ph / 2 << ")\">" << escape(y_label) << (log_y ? " (log scale)" : "") << "</text>\n";
  if (n > 0) {
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i)
      s << num(px(series.x[i])) << ',' << num(py(series.y[i])) << (i + 1 < n ? " " : "");
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string heatmaps(const std::string& title, const std::string& x_label,
                     const std::string& y_label, double cell,
                     const std::vector<HeatPanel>& panels) {
  const double panel = 320, gap = 90, left = 70, top = 50, bottom = 60;
  const double w = left + panels.size() * (panel + gap);
  const double h = top + panel + bottom;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& pn = panels[p];
    const double ox = left + p * (panel + gap);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : pn.cells) {
      if (!std::isfinite(c.value)) continue;
      lo = std::min(lo, c.value);
      hi = std::max(hi, c.value);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    s << "<text x=\"" << num(ox + panel / 2) << "\" y=\"" << num(top - 8)
      << "\" text-anchor=\"middle\">" << escape(pn.title) << " [" << label(lo) << ", "
      << label(hi) << "]</text>\n";
    s << "<rect x=\"" << num(ox) << "\" y=\"" << num(top) << "\" width=\"" << num(panel)
      << "\" height=\"" << num(panel) << "\" fill=\"#eeeeee\" stroke=\"black\"/>\n";
    const double side = panel * cell;
    for (const auto& c : pn.cells) {
      const double cx = ox + (c.x - cell / 2) * panel;
      const double cy = top + panel - (c.y + cell / 2) * panel;
      s << "<rect x=\"" << num(cx) << "\" y=\"" << num(cy) << "\" width=\"" << num(side)
        << "\" height=\"" << num(side) << "\" fill=\"" << color((c.value - lo) / span)
        << "\"><title>" << label(c.x) << ", " << label(c.y) << ": " << label(c.value)
        << "</title></rect>\n";
    }
    s << "<text x=\"" << num(ox + panel / 2) << "\" y=\"" << num(top + panel + 36)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    s << "<text x=\"" << num(ox - 30) << "\" y=\"" << num(top + panel / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << num(ox - 30) << ' '
      << num(top + panel / 2) << ")\">" << escape(y_label) << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
      s << "<text x=\"" << num(ox + panel * i / 4.0) << "\" y=\"" << num(top + panel + 16)
        << "\" text-anchor=\"middle\">" << label(i / 4.0) << "</text>\n";
      s << "<text x=\"" << num(ox - 4) << "\" y=\"" << num(top + panel - panel * i / 4.0 + 4)
        << "\" text-anchor=\"end\">" << label(i / 4.0) << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace drsplit::svg
