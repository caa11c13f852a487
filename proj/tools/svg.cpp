#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace slelab::plot {
namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  void add(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  void finish(bool equal_aspect) {
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double mx = 0.05 * (x1 - x0), my = 0.05 * (y1 - y0);
    x0 -= mx, x1 += mx, y0 -= my, y1 += my;
    if (equal_aspect) {
      const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
      const double scale = std::max((x1 - x0) / pw, (y1 - y0) / ph);
      const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
      x0 = cx - 0.5 * scale * pw, x1 = cx + 0.5 * scale * pw;
      y0 = cy - 0.5 * scale * ph, y1 = cy + 0.5 * scale * ph;
    }
  }
  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
  double scale() const { return (kWidth - kLeft - kRight) / (x1 - x0); }
};

void axes(std::ostringstream& o, const Box& b, const PlotSpec& s, bool log) {
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
    << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = b.x0 + (b.x1 - b.x0) * i / 4.0;
    const double fy = b.y0 + (b.y1 - b.y0) * i / 4.0;
    o << "<text x=\"" << num(b.px(fx)) << "\" y=\"" << kHeight - kBottom + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">"
      << num(log ? std::pow(10.0, fx) : fx) << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(b.py(fy) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">"
      << num(log ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  o << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
    << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(s.x_label)
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << kHeight / 2
    << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << kHeight / 2 << ")\">" << escape(s.y_label) << "</text>\n";
  if (!s.title.empty())
    o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" font-size=\"15\" "
      << "text-anchor=\"middle\">" << escape(s.title) << "</text>\n";
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
    << kWidth << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth
    << " " << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  Box box;
  switch (spec.kind) {
    case PlotKind::LogLog: {
      for (const auto& s : spec.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
          if (s.x[i] > 0 && s.y[i] > 0) box.add(std::log10(s.x[i]), std::log10(s.y[i]));
      box.finish(false);
      axes(o, box, spec, true);
      int c = 0;
      for (const auto& s : spec.series) {
        const char* colour = kColours[c++ % 6];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
          if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
          const double X = box.px(std::log10(s.x[i])), Y = box.py(std::log10(s.y[i]));
          pts += num(X) + "," + num(Y) + " ";
          o << "<circle cx=\"" << num(X) << "\" cy=\"" << num(Y)
            << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
        }
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\""
          << pts << "\"/>\n";
        if (!s.label.empty())
          o << "<text x=\"" << kWidth - kRight - 8 << "\" y=\""
            << kTop + 16 * c << "\" font-size=\"12\" text-anchor=\"end\" fill=\""
            << colour << "\">" << escape(s.label) << "</text>\n";
      }
      break;
    }
    case PlotKind::Trace: {
      const Series empty;
      const Series& s = spec.series.empty() ? empty : spec.series.front();
      const std::size_t n = std::min(s.x.size(), s.y.size());
      for (std::size_t i = 0; i < n; ++i) box.add(s.x[i], s.y[i]);
      box.add(box.x0, 0.0);
      box.finish(true);
      axes(o, box, spec, false);
      o << "<line x1=\"" << kLeft << "\" y1=\"" << num(box.py(0)) << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << num(box.py(0))
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
      o << "<polyline fill=\"none\" stroke=\"" << kColours[0]
        << "\" stroke-width=\"1\" points=\"";
      for (std::size_t i = 0; i < n; ++i)
        o << num(box.px(s.x[i])) << "," << num(box.py(s.y[i])) << " ";
      o << "\"/>\n";
      break;
    }
    case PlotKind::Circles: {
      for (const auto& c : spec.circles) {
        box.add(c.cx - c.r, c.cy - c.r);
        box.add(c.cx + c.r, c.cy + c.r);
      }
      for (const auto& m : spec.markers) box.add(m.first, m.second);
      box.add(box.x0, 0.0);
      box.finish(true);
      axes(o, box, spec, false);
      o << "<line x1=\"" << kLeft << "\" y1=\"" << num(box.py(0)) << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << num(box.py(0))
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
      for (const auto& c : spec.circles)
        o << "<circle cx=\"" << num(box.px(c.cx)) << "\" cy=\""
          << num(box.py(c.cy)) << "\" r=\"" << num(c.r * box.scale())
          << "\" fill=\"none\" stroke=\"" << kColours[c.group % 6] << "\"/>\n";
      for (const auto& m : spec.markers)
        o << "<circle cx=\"" << num(box.px(m.first)) << "\" cy=\""
          << num(box.py(m.second)) << "\" r=\"2.5\" fill=\"black\"/>\n";
      break;
    }
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const PlotSpec& spec) {
  std::ofstream f(spec.output_path);
  if (!f) throw std::runtime_error("cannot open " + spec.output_path);
  f << render_svg(spec);
  if (!f) throw std::runtime_error("cannot write " + spec.output_path);
}

}  // namespace slelab::plot
