#pragma once

// Self-contained SVG line charts for convergence traces: log-scaled y axis
// with decade ticks, optional log x, one polyline per series. Output is a
// pure function of the input data.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsynth {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), y > 0
};

struct SvgOptions {
  int width = 800;
  int height = 500;
  bool log_x = false;
  std::string x_label = "sweep";
  std::string y_label = "cost";
};

inline std::string render_line_chart(const std::vector<SvgSeries>& series,
                                     const SvgOptions& opt = {}) {
  if (series.empty())
    throw std::invalid_argument("render_line_chart: no series");
  for (const SvgSeries& s : series)
    if (s.points.empty())
      throw std::invalid_argument("render_line_chart: empty trace \"" + s.label + "\"");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = 1e-300;
  for (const SvgSeries& s : series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (y > 0) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (ymin > ymax) {  // all-zero traces
    ymin = 1e-16;
    ymax = 1.0;
  }
  ymin = std::pow(10.0, std::floor(std::log10(ymin)));
  ymax = std::pow(10.0, std::ceil(std::log10(ymax) + (ymax == ymin ? 1 : 0)));
  if (opt.log_x) xmin = std::max(xmin, 1.0);
  if (xmax <= xmin) xmax = xmin + 1;

  const double ml = 70, mr = 20, mt = 20, mb = 45;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
  const auto sx = [&](double x) {
    const double t = opt.log_x ? (std::log10(std::max(x, xmin)) - std::log10(xmin)) /
                                     (std::log10(xmax) - std::log10(xmin))
                               : (x - xmin) / (xmax - xmin);
    return ml + t * pw;
  };
  const auto sy = [&](double y) {
    const double t = (std::log10(std::max(y, ymin)) - std::log10(ymin)) /
                     (std::log10(ymax) - std::log10(ymin));
    return mt + (1.0 - t) * ph;
  };
  const auto num = [](double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                opt.width, opt.height, opt.width, opt.height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // y decades
  for (double e = std::log10(ymin); e <= std::log10(ymax) + 0.5; e += 1.0) {
    const double y = std::pow(10.0, std::round(e));
    if (y > ymax * 1.0001) break;
    const double py = sy(y);
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(ml + pw) + "\" y2=\"" + num(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%s\" y=\"%s\" font-size=\"11\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\">1e%d</text>\n",
                  num(ml - 6).c_str(), num(py + 4).c_str(),
                  static_cast<int>(std::round(std::log10(y))));
    svg += buf;
  }
  // x ticks: 5 evenly spaced (or decades when log)
  if (opt.log_x) {
    for (double e = std::ceil(std::log10(xmin)); e <= std::log10(xmax) + 1e-9; e += 1.0) {
      const double x = std::pow(10.0, e);
      const double px = sx(x);
      svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(px) +
             "\" y2=\"" + num(mt + ph) + "\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n";
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%s\" y=\"%s\" font-size=\"11\" text-anchor=\"middle\" "
                    "font-family=\"sans-serif\">1e%d</text>\n",
                    num(px).c_str(), num(mt + ph + 16).c_str(), static_cast<int>(e));
      svg += buf;
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double x = xmin + (xmax - xmin) * k / 4.0;
      const double px = sx(x);
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%s\" y=\"%s\" font-size=\"11\" text-anchor=\"middle\" "
                    "font-family=\"sans-serif\">%.6g</text>\n",
                    num(px).c_str(), num(mt + ph + 16).c_str(), x);
      svg += buf;
    }
  }
  // frame
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % 8];
    std::string pts;
    for (const auto& [x, y] : series[i].points)
      pts += num(sx(x)) + "," + num(sy(std::max(y, ymin))) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 16 + 16 * static_cast<double>(i);
    svg += "<line x1=\"" + num(ml + pw - 150) + "\" y1=\"" + num(ly - 4) +
           "\" x2=\"" + num(ml + pw - 130) + "\" y2=\"" + num(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(ml + pw - 125) + "\" y=\"" + num(ly) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" + series[i].label +
           "</text>\n";
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%s\" y=\"%s\" font-size=\"12\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\">%s</text>\n",
                num(ml + pw / 2).c_str(), num(mt + ph + 34).c_str(),
                opt.x_label.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%s\" font-size=\"12\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\" transform=\"rotate(-90 14 %s)\">%s</text>\n",
                num(mt + ph / 2).c_str(), num(mt + ph / 2).c_str(),
                opt.y_label.c_str());
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace qsynth
