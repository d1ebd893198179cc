#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "abc/error.hpp"
#include "config.hpp"

namespace abc::cli {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0, kMargin = 60.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#17becf", "#8c564b", "#000000"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

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

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  void pad() {
    if (!(x1 > x0)) {
      x0 -= 1.0;
      x1 += 1.0;
    }
    if (!(y1 > y0)) {
      y0 -= 1.0;
      y1 += 1.0;
    }
  }
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

// Oblique projection for 3d paths.
std::pair<double, double> project(double x, double y, double z) {
  return {x + 0.5 * z * 0.8660254037844386, y + 0.25 * z};
}

}  // namespace

FigureKind figureKindFromString(const std::string& name) {
  if (name == "xy-projection") return FigureKind::XyProjection;
  if (name == "3d-path") return FigureKind::Path3d;
  if (name == "mask") return FigureKind::Mask;
  if (name == "poincare") return FigureKind::Poincare;
  if (name == "fraction-curve") return FigureKind::FractionCurve;
  throw UsageError("unknown figure kind '" + name + "'");
}

std::string to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::XyProjection: return "xy-projection";
    case FigureKind::Path3d: return "3d-path";
    case FigureKind::Mask: return "mask";
    case FigureKind::Poincare: return "poincare";
    case FigureKind::FractionCurve: return "fraction-curve";
  }
  return "xy-projection";
}

std::string emitFigure(const FigureData& data, FigureKind kind) {
  std::string body;
  Box box;

  if (kind == FigureKind::Mask) {
    const MaskGrid& m = data.mask;
    if (m.columns == 0 || m.rows == 0 || m.cells.size() != m.columns * m.rows) {
      throw Error(ErrorCode::EmptyData, "mask figure needs a nonempty grid");
    }
    box = {0.0, static_cast<double>(m.columns), 0.0, static_cast<double>(m.rows)};
    const double cw = (kWidth - 2 * kMargin) / static_cast<double>(m.columns);
    const double ch = (kHeight - 2 * kMargin) / static_cast<double>(m.rows);
    body += "<g fill=\"#1f77b4\" stroke=\"none\">\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.columns; ++c) {
        if (!m.cells[r * m.columns + c]) continue;
        body += "<rect x=\"" + num(box.px(static_cast<double>(c))) + "\" y=\"" +
                num(box.py(static_cast<double>(r + 1))) + "\" width=\"" + num(cw) +
                "\" height=\"" + num(ch) + "\"/>\n";
      }
    }
    body += "</g>\n";
  } else {
    bool any = false;
    for (const Series& s : data.series) {
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (kind == FigureKind::Path3d) {
          const double z = k < s.z.size() ? s.z[k] : 0.0;
          const auto [u, v] = project(s.x[k], s.y[k], z);
          box.add(u, v);
        } else {
          box.add(s.x[k], s.y[k]);
        }
        any = true;
      }
    }
    if (!any) throw Error(ErrorCode::EmptyData, "figure has no data points");
    box.pad();
    for (std::size_t i = 0; i < data.series.size(); ++i) {
      const Series& s = data.series[i];
      const std::string color = kPalette[i % std::size(kPalette)];
      const std::size_t n = std::min(s.x.size(), s.y.size());
      if (n == 0) continue;
      if (kind == FigureKind::Poincare) {
        body += "<g fill=\"" + color + "\" stroke=\"none\">\n";
        for (std::size_t k = 0; k < n; ++k) {
          body += "<circle cx=\"" + num(box.px(s.x[k])) + "\" cy=\"" + num(box.py(s.y[k])) +
                  "\" r=\"1.5\"/>\n";
        }
        body += "</g>\n";
        continue;
      }
      body += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1\" points=\"";
      for (std::size_t k = 0; k < n; ++k) {
        double u = s.x[k], v = s.y[k];
        if (kind == FigureKind::Path3d) {
          std::tie(u, v) = project(s.x[k], s.y[k], k < s.z.size() ? s.z[k] : 0.0);
        }
        if (k) body += ' ';
        body += num(box.px(u)) + "," + num(box.py(v));
      }
      body += "\"/>\n";
      if (kind == FigureKind::FractionCurve) {
        body += "<g fill=\"" + color + "\">\n";
        for (std::size_t k = 0; k < n; ++k) {
          body += "<circle cx=\"" + num(box.px(s.x[k])) + "\" cy=\"" + num(box.py(s.y[k])) +
                  "\" r=\"3\"/>\n";
        }
        body += "</g>\n";
      }
      if (!s.label.empty()) {
        body += "<text x=\"" + num(kWidth - kMargin + 4) + "\" y=\"" + num(kMargin + 14.0 * i) +
                "\" font-size=\"11\" fill=\"" + color + "\">" + escape(s.label) + "</text>\n";
      }
    }
  }

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" +
         escape(data.title) + "</text>\n";
  out += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
         num(kWidth - 2 * kMargin) + "\" height=\"" + num(kHeight - 2 * kMargin) +
         "\" fill=\"none\" stroke=\"#444444\"/>\n";
  auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"10\" text-anchor=\"" +
           anchor + "\">" + escape(text) + "</text>\n";
  };
  if (kind != FigureKind::Mask) {
    label(kMargin, kHeight - kMargin + 14, num(box.x0), "start");
    label(kWidth - kMargin, kHeight - kMargin + 14, num(box.x1), "end");
    label(kMargin - 4, kHeight - kMargin, num(box.y0), "end");
    label(kMargin - 4, kMargin + 10, num(box.y1), "end");
  }
  label(kWidth / 2, kHeight - 20, data.xLabel, "middle");
  label(20, kHeight / 2, data.yLabel, "middle");
  out += body;
  out += "</svg>\n";
  return out;
}

}  // namespace abc::cli
