#include "ceglab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ceglab/errors.hpp"

namespace ceglab::svg {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 200.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char *const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

const char *color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log) {
  char buf[32];
  if (log) {
    const double e = std::log10(v);
    if (std::fabs(e - std::round(e)) < 1e-9 && (std::fabs(e) >= 4)) {
      std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::round(e)));
      return buf;
    }
  }
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double unit(double v) const {
    if (log) {
      return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    }
    return (v - lo) / (hi - lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int first = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
      const int last = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
      const int stride = std::max(1, (last - first) / 8 + 1);
      // Short ranges get 2x and 5x ticks too, so at least a few labels show.
      const bool fine = std::log10(hi) - std::log10(lo) < 2.0;
      for (int e = first - 1; e <= last; e += stride) {
        for (const double m : {1.0, 2.0, 5.0}) {
          const double t = m * std::pow(10.0, e);
          if ((m == 1.0 || fine) && t >= lo * (1 - 1e-9) && t <= hi * (1 + 1e-9)) {
            out.push_back(t);
          }
        }
      }
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
      out.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
    }
    return out;
  }
};

Axis make_axis(double lo, double hi, bool log) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("chart: no finite data to plot");
  }
  if (log && !(lo > 0.0)) {
    throw DomainError("chart: log axis needs positive values");
  }
  Axis a{lo, hi, log};
  if (lo == hi) {
    if (log) {
      a.lo = lo / 2.0;
      a.hi = hi * 2.0;
    } else {
      const double pad = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.1;
      a.lo = lo - pad;
      a.hi = hi + pad;
    }
  } else if (!log) {
    const double pad = (hi - lo) * 0.05;
    a.lo = lo - pad;
    a.hi = hi + pad;
  }
  return a;
}

double px(const Axis &a, double v) { return kLeft + a.unit(v) * kPlotW; }
double py(const Axis &a, double v) { return kTop + (1.0 - a.unit(v)) * kPlotH; }

class Document {
public:
  explicit Document(const std::string &title) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
         << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight)
         << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
         << "\" fill=\"#ffffff\"/>\n";
    text(kWidth / 2.0, 28.0, title, "middle", 16);
  }

  void text(double x, double y, const std::string &s, const char *anchor = "start",
            int size = 12, double rotate = 0.0) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
         << "\" font-size=\"" << size << "\"";
    if (rotate != 0.0) {
      out_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
    }
    out_ << '>' << escape(s) << "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, const char *stroke, double width = 1.0,
            bool dashed = false) {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
         << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << num(width) << "\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
  }

  void raw(const std::string &s) { out_ << s; }

  void axes(const Axis &x, const Axis &y, const std::string &x_label,
            const std::string &y_label) {
    out_ << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kPlotW)
         << "\" height=\"" << num(kPlotH) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (const double t : x.ticks()) {
      const double X = px(x, t);
      line(X, kTop, X, kTop + kPlotH, "#e0e0e0");
      text(X, kTop + kPlotH + 18.0, tick_label(t, x.log), "middle", 11);
    }
    for (const double t : y.ticks()) {
      const double Y = py(y, t);
      line(kLeft, Y, kLeft + kPlotW, Y, "#e0e0e0");
      text(kLeft - 6.0, Y + 4.0, tick_label(t, y.log), "end", 11);
    }
    text(kLeft + kPlotW / 2.0, kHeight - 20.0, x_label, "middle", 13);
    text(22.0, kTop + kPlotH / 2.0, y_label, "middle", 13, -90.0);
  }

  void legend(std::size_t index, const std::string &label, const char *fill) {
    const double x = kLeft + kPlotW + 16.0;
    const double y = kTop + 10.0 + 20.0 * static_cast<double>(index);
    out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9.0)
         << "\" width=\"12\" height=\"12\" fill=\"" << fill << "\"/>\n";
    text(x + 18.0, y + 1.0, label, "start", 11);
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

private:
  std::ostringstream out_;
};

} // namespace

std::string escape(const std::string &text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    case '\'':
      out += "&apos;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

std::string render(const LineChart &chart) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const Series &s : chart.series) {
    if (s.x.size() != s.y.size()) {
      throw DomainError("chart: series '" + s.name + "' has mismatched x and y");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  const Axis xa = make_axis(x_lo, x_hi, chart.log_x);
  const Axis ya = make_axis(y_lo, y_hi, chart.log_y);

  Document doc(chart.title);
  doc.axes(xa, ya, chart.x_label, chart.y_label);
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series &s = chart.series[k];
    std::ostringstream shape;
    if (s.markers) {
      shape << "<g fill=\"" << color(k) << "\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        shape << "<circle cx=\"" << num(px(xa, s.x[i])) << "\" cy=\"" << num(py(ya, s.y[i]))
              << "\" r=\"2.5\"/>\n";
      }
      shape << "</g>\n";
    } else {
      shape << "<polyline fill=\"none\" stroke=\"" << color(k) << "\" stroke-width=\"2\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        shape << (i ? " " : "") << num(px(xa, s.x[i])) << ',' << num(py(ya, s.y[i]));
      }
      shape << "\"/>\n";
    }
    doc.raw(shape.str());
    doc.legend(k, s.name, color(k));
  }
  return doc.finish();
}

std::string render(const StackedAreaChart &chart) {
  const std::size_t n = chart.x.size();
  if (n == 0) {
    throw DomainError("chart: stacked area needs at least one x value");
  }
  std::vector<double> pos(n, 0.0);
  std::vector<double> neg(n, 0.0);
  std::vector<std::vector<double>> lower;
  std::vector<std::vector<double>> upper;
  for (const auto &[name, values] : chart.layers) {
    if (values.size() != n) {
      throw DomainError("chart: layer '" + name + "' has the wrong length");
    }
    std::vector<double> lo(n);
    std::vector<double> hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (values[i] >= 0.0) {
        lo[i] = pos[i];
        pos[i] += values[i];
        hi[i] = pos[i];
      } else {
        hi[i] = neg[i];
        neg[i] += values[i];
        lo[i] = neg[i];
      }
    }
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
  }
  const double y_lo = *std::min_element(neg.begin(), neg.end());
  const double y_hi = std::max(*std::max_element(pos.begin(), pos.end()), 0.0);
  const auto [x_min, x_max] = std::minmax_element(chart.x.begin(), chart.x.end());
  const Axis xa = make_axis(*x_min, *x_max, false);
  const Axis ya = make_axis(y_lo, y_hi, false);

  Document doc(chart.title);
  doc.axes(xa, ya, chart.x_label, chart.y_label);
  for (std::size_t k = 0; k < chart.layers.size(); ++k) {
    std::ostringstream poly;
    poly << "<polygon fill=\"" << color(k) << "\" fill-opacity=\"0.85\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      poly << (i ? " " : "") << num(px(xa, chart.x[i])) << ',' << num(py(ya, upper[k][i]));
    }
    for (std::size_t i = n; i-- > 0;) {
      poly << ' ' << num(px(xa, chart.x[i])) << ',' << num(py(ya, lower[k][i]));
    }
    poly << "\"/>\n";
    doc.raw(poly.str());
    doc.legend(k, chart.layers[k].first, color(k));
  }
  if (chart.total_line) {
    std::ostringstream total;
    total << "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      total << (i ? " " : "") << num(px(xa, chart.x[i])) << ','
            << num(py(ya, pos[i] + neg[i]));
    }
    total << "\"/>\n";
    doc.raw(total.str());
  }
  return doc.finish();
}

std::string render(const BarChart &chart) {
  if (chart.bars.empty()) {
    throw DomainError("chart: bar chart needs at least one bar");
  }
  double hi = 0.0;
  double lo = chart.log_y ? std::numeric_limits<double>::infinity() : 0.0;
  for (const auto &[label, v] : chart.bars) {
    if (chart.log_y && !(v > 0.0)) {
      throw DomainError("chart: log bar chart needs positive values ('" + label + "')");
    }
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  // Log bars grow from 1x, so gains point up and penalties point down.
  Axis ya = chart.log_y ? make_axis(std::min(lo, 1.0) / 1.5, std::max(hi, 1.0) * 1.5, true)
                        : make_axis(lo, hi, false);
  if (!chart.log_y) {
    ya.lo = std::min(lo, 0.0);
  }
  const Axis xa{0.0, static_cast<double>(chart.bars.size()), false};

  Document doc(chart.title);
  // Category axis: no numeric x ticks, labels under each bar.
  doc.raw("<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) +
          "\" height=\"" + num(kPlotH) + "\" fill=\"none\" stroke=\"#333333\"/>\n");
  for (const double t : ya.ticks()) {
    const double Y = py(ya, t);
    doc.line(kLeft, Y, kLeft + kPlotW, Y, "#e0e0e0");
    doc.text(kLeft - 6.0, Y + 4.0, tick_label(t, ya.log), "end", 11);
  }
  doc.text(22.0, kTop + kPlotH / 2.0, chart.y_label, "middle", 13, -90.0);
  const double base = chart.log_y ? 1.0 : 0.0;
  const double slot = kPlotW / static_cast<double>(chart.bars.size());
  for (std::size_t i = 0; i < chart.bars.size(); ++i) {
    const auto &[label, v] = chart.bars[i];
    const double x0 = px(xa, static_cast<double>(i)) + slot * 0.15;
    const double top = py(ya, std::max(v, base));
    const double bottom = py(ya, std::min(v, base));
    doc.raw("<rect x=\"" + num(x0) + "\" y=\"" + num(top) + "\" width=\"" + num(slot * 0.7) +
            "\" height=\"" + num(bottom - top) + "\" fill=\"" + color(i) + "\"/>\n");
    const double value_y = v >= base ? top - 4.0 : bottom + 12.0;
    doc.text(x0 + slot * 0.35, value_y, tick_label(v, false), "middle", 10);
    doc.text(x0 + slot * 0.35, kTop + kPlotH + 14.0, label, "end", 10, -30.0);
  }
  return doc.finish();
}

} // namespace ceglab::svg
