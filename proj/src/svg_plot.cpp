#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace missvar::plot {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

double transform(double v, bool log_axis) {
  return log_axis ? std::log10(v) : v;
}

bool usable(double v, bool log_axis) {
  return std::isfinite(v) && (!log_axis || v > 0.0);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::string tick_label(double t, bool log_axis) {
  return fmt(log_axis ? std::pow(10.0, t) : t);
}

std::vector<double> ticks(const AxisRange& r) {
  std::vector<double> out;
  const double span = r.hi - r.lo;
  if (span <= 0.0) {
    out.push_back(r.lo);
    return out;
  }
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-12 * span;
       t += step)
    out.push_back(t);
  return out;
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

}  // namespace

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());

  AxisRange xr{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  AxisRange yr = xr;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], spec.logx) || !usable(s.y[i], spec.logy)) continue;
      const double tx = transform(s.x[i], spec.logx);
      const double ty = transform(s.y[i], spec.logy);
      xr.lo = std::min(xr.lo, tx);
      xr.hi = std::max(xr.hi, tx);
      yr.lo = std::min(yr.lo, ty);
      yr.hi = std::max(yr.hi, ty);
    }
  }
  if (!std::isfinite(xr.lo)) xr = {0.0, 1.0};
  if (!std::isfinite(yr.lo)) yr = {0.0, 1.0};
  if (xr.hi == xr.lo) { xr.lo -= 0.5; xr.hi += 0.5; }
  if (yr.hi == yr.lo) { yr.lo -= 0.5; yr.hi += 0.5; }
  const double xpad = 0.04 * (xr.hi - xr.lo);
  const double ypad = 0.06 * (yr.hi - yr.lo);
  xr.lo -= xpad; xr.hi += xpad;
  yr.lo -= ypad; yr.hi += ypad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double tx) {
    return kMarginLeft + (tx - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto py = [&](double ty) {
    return kMarginTop + plot_h - (ty - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(spec.title)
      << "</text>\n";
  int ann_y = 38;
  for (const auto& a : spec.annotations) {
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << ann_y
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">"
        << escape(a) << "</text>\n";
    ann_y += 14;
  }

  // axes box and ticks
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xr)) {
    const double x = px(t);
    out << "<line x1=\"" << x << "\" y1=\"" << kMarginTop + plot_h
        << "\" x2=\"" << x << "\" y2=\"" << kMarginTop + plot_h + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << tick_label(t, spec.logx) << "</text>\n";
  }
  for (double t : ticks(yr)) {
    const double y = py(t);
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << y << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << y << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << tick_label(t, spec.logy) << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
      << kHeight - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << escape(spec.xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 16 "
      << kMarginTop + plot_h / 2 << ")\">" << escape(spec.ylabel)
      << "</text>\n";

  int color_idx = 0;
  int legend_y = kMarginTop + 10;
  for (const auto& s : spec.series) {
    const char* color = kColors[color_idx % 8];
    ++color_idx;
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], spec.logx) || !usable(s.y[i], spec.logy)) continue;
      pts << px(transform(s.x[i], spec.logx)) << ','
          << py(transform(s.y[i], spec.logy)) << ' ';
      out << "<circle cx=\"" << px(transform(s.x[i], spec.logx)) << "\" cy=\""
          << py(transform(s.y[i], spec.logy)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const std::string p = pts.str();
    if (!p.empty())
      out << "<polyline points=\"" << p
          << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\""
        << legend_y << "\" x2=\"" << kWidth - kMarginRight + 30 << "\" y2=\""
        << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kMarginRight + 35 << "\" y=\""
        << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace missvar::plot
