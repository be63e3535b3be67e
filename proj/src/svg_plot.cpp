#include "fdia/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fdia {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string render_svg(const LinePlot& plot) {
  constexpr double left = 70, right = 160, top = 36, bottom = 48;
  const double w = plot.width, h = plot.height;
  const double pw = w - left - right, ph = h - top - bottom;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& line : plot.lines)
    for (std::size_t i = 0; i < std::min(line.x.size(), line.y.size()); ++i) {
      if (!std::isfinite(line.x[i]) || !std::isfinite(line.y[i])) continue;
      x0 = std::min(x0, line.x[i]);
      x1 = std::max(x1, line.x[i]);
      y0 = std::min(y0, line.y[i]);
      y1 = std::max(y1, line.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
      << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double fx = x0 + (x1 - x0) * k / 4.0;
    out << "<line x1=\"" << num(left) << "\" x2=\"" << num(left + pw) << "\" y1=\"" << num(sy(fy))
        << "\" y2=\"" << num(sy(fy)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(fy) + 4)
        << "\" text-anchor=\"end\">" << tick(fy) << "</text>\n";
    out << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(top + ph + 16)
        << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(h - 8) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << num(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t li = 0; li < plot.lines.size(); ++li) {
    const auto& line = plot.lines[li];
    const std::string style = "fill=\"none\" stroke=\"" + line.color + "\" stroke-width=\"1.2\"" +
                              (line.dashed ? " stroke-dasharray=\"6,4\"" : "");
    std::string points;
    auto flush = [&] {
      if (!points.empty()) out << "<polyline " << style << " points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(line.x.size(), line.y.size()); ++i) {
      if (!std::isfinite(line.x[i]) || !std::isfinite(line.y[i])) {
        flush();
        continue;
      }
      points += num(sx(line.x[i])) + "," + num(sy(line.y[i])) + " ";
    }
    flush();
    const double ly = top + 14 + 18.0 * static_cast<double>(li);
    out << "<line x1=\"" << num(left + pw + 10) << "\" x2=\"" << num(left + pw + 34) << "\" y1=\""
        << num(ly) << "\" y2=\"" << num(ly) << "\" " << style << "/>\n";
    out << "<text x=\"" << num(left + pw + 40) << "\" y=\"" << num(ly + 4) << "\">"
        << escape(line.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void save_svg(const LinePlot& plot, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << render_svg(plot);
}

}  // namespace fdia
