#include "spherebot/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 280.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 45.0;
constexpr std::size_t kMaxPoints = 2000;

std::string fmt(double x, const char* spec = "%.2f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, x);
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0}) {
    if (raw <= f * mag) {
      return f * mag;
    }
  }
  return 10.0 * mag;
}

void draw_panel(std::ostream& out, const Panel& p, double y0) {
  const double w = kWidth - kLeft - kRight;
  const double h = kPanelHeight - kTop - kBottom;
  Range xr, yr;
  for (const Series& s : p.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  if (p.equal_aspect) {
    const double sx = (xr.hi - xr.lo) / w;
    const double sy = (yr.hi - yr.lo) / h;
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (xr.lo + xr.hi);
    const double cy = 0.5 * (yr.lo + yr.hi);
    xr = {cx - 0.5 * s * w, cx + 0.5 * s * w};
    yr = {cy - 0.5 * s * h, cy + 0.5 * s * h};
  }
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * w; };
  auto py = [&](double y) { return y0 + kTop + h - (y - yr.lo) / (yr.hi - yr.lo) * h; };

  out << "<g>\n";
  out << "<text x=\"" << fmt(kLeft + 0.5 * w) << "\" y=\"" << fmt(y0 + 18)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(p.title) << "</text>\n";
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(y0 + kTop) << "\" width=\"" << fmt(w)
      << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const double xs = nice_step(xr.hi - xr.lo);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi; v += xs) {
    out << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(y0 + kTop) << "\" x2=\"" << fmt(px(v))
        << "\" y2=\"" << fmt(y0 + kTop + h) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(y0 + kTop + h + 15)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(v, "%g") << "</text>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo);
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi; v += ys) {
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(kLeft + w)
        << "\" y2=\"" << fmt(py(v)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(std::abs(v) < 1e-12 ? 0.0 : v, "%g")
        << "</text>\n";
  }
  out << "<text x=\"" << fmt(kLeft + 0.5 * w) << "\" y=\"" << fmt(y0 + kPanelHeight - 8)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(y0 + kTop + 0.5 * h) << "\" text-anchor=\"middle\" "
      << "font-size=\"11\" transform=\"rotate(-90 16 " << fmt(y0 + kTop + 0.5 * h) << ")\">"
      << escape(p.y_label) << "</text>\n";

  double legend_y = y0 + kTop + 10;
  for (const Series& s : p.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
      }
    }
    if (n > 0 && (n - 1) % stride != 0) {
      out << fmt(px(s.x[n - 1])) << ',' << fmt(py(s.y[n - 1]));
    }
    out << "\"/>\n";
    const double lx = kLeft + w + 10;
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(legend_y) << "\" x2=\"" << fmt(lx + 20)
        << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << fmt(lx + 25) << "\" y=\"" << fmt(legend_y + 4)
        << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  out << "</g>\n";
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  return out;
}

}  // namespace

void write_svg(const std::vector<Panel>& panels, const std::filesystem::path& path) {
  std::ostringstream svg;
  const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth, "%.0f")
      << "\" height=\"" << fmt(height, "%.0f") << "\" viewBox=\"0 0 " << fmt(kWidth, "%.0f") << ' '
      << fmt(height, "%.0f") << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(svg, panels[i], kPanelHeight * static_cast<double>(i));
  }
  svg << "</svg>\n";
  std::ofstream out = open_out(path);
  out << svg.str();
  if (!out.flush()) {
    throw Error("write failed for " + path.string());
  }
}

void write_dat(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
               const std::filesystem::path& path) {
  if (names.size() != columns.size()) {
    throw Error("write_dat: name and column counts differ");
  }
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    rows = std::min(rows, c.size());
  }
  std::ofstream out = open_out(path);
  out << '#';
  for (const auto& n : names) {
    out << ' ' << n;
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << (c ? " " : "") << fmt(columns[c][r], "%.10g");
    }
    out << '\n';
  }
  if (!out.flush()) {
    throw Error("write failed for " + path.string());
  }
}

}  // namespace spherebot
