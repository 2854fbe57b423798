#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace whitelasso::cli {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kLeft = 62.0;
constexpr double kRight = 16.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 44.0;

struct Point {
  double n = 0.0;
  double y = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct Series {
  std::string estimator;
  std::vector<Point> points;  // sorted by n
};

struct Panel {
  double p = 0.0;
  double rho = 0.0;
  std::vector<Series> series;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
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

std::string color(const std::string& estimator, std::size_t index) {
  if (estimator == "lasso") return "#1f77b4";
  if (estimator == "gls") return "#d62728";
  if (estimator == "fgls") return "#2ca02c";
  static const char* palette[] = {"#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[index % 6];
}

std::string axis_label(const std::string& metric) {
  if (metric == "mean_l2_scaled") return "mean p^(-1/2) l2 error";
  if (metric == "mean_linf") return "mean l-inf error";
  return "sign recovery rate";
}

// 1, 2 or 5 times a power of ten, close to range / 5.
double tick_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

std::string tick_text(double v, double step) {
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range y_range(const std::vector<Panel>& panels, const ChartSpec& spec) {
  if (spec.metric == "sign_rate") return {0.0, 1.0};
  double top = 0.0;
  for (const auto& panel : panels)
    for (const auto& s : panel.series)
      for (const auto& pt : s.points) {
        top = std::max(top, pt.y);
        if (spec.bands && std::isfinite(pt.hi)) top = std::max(top, pt.hi);
      }
  if (!(top > 0.0)) return {0.0, 1.0};
  const double step = tick_step(top);
  return {0.0, std::ceil(top / step * (1.0 + 1e-12)) * step};
}

void draw_panel(std::ostringstream& svg, double x0, double y0, const Panel& panel, const Range& yr,
                const ChartSpec& spec) {
  const double w = kPanelW - kLeft - kRight;
  const double h = kPanelH - kTop - kBottom;
  double n_lo = INFINITY, n_hi = -INFINITY;
  std::vector<double> ns;
  for (const auto& s : panel.series)
    for (const auto& pt : s.points) {
      n_lo = std::min(n_lo, pt.n);
      n_hi = std::max(n_hi, pt.n);
      ns.push_back(pt.n);
    }
  if (ns.empty()) n_lo = n_hi = 0.0;
  if (n_hi == n_lo) {
    n_lo -= 1.0;
    n_hi += 1.0;
  }
  auto px = [&](double n) { return kLeft + (n - n_lo) / (n_hi - n_lo) * w; };
  auto py = [&](double y) {
    const double c = std::clamp(y, yr.lo, yr.hi);
    return kTop + (1.0 - (c - yr.lo) / (yr.hi - yr.lo)) * h;
  };

  svg << "<g transform=\"translate(" << num(x0) << "," << num(y0) << ")\">\n";
  svg << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">rho = "
      << format_double(panel.rho) << ", p = " << format_double(panel.p) << "</text>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" fill=\"none\" stroke=\"#000000\"/>\n";

  const double ystep = tick_step(yr.hi - yr.lo);
  for (int k = 0;; ++k) {
    const double v = yr.lo + k * ystep;
    if (v > yr.hi + ystep * 1e-9) break;
    svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(py(v)) << "\" stroke=\"#000000\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
        << tick_text(v, ystep) << "</text>\n";
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<double> xticks;
  if (ns.size() <= 10) {
    xticks = ns;
  } else {
    const double step = tick_step(n_hi - n_lo);
    for (double v = std::ceil(n_lo / step) * step; v <= n_hi + step * 1e-9; v += step) xticks.push_back(v);
  }
  for (double v : xticks) {
    svg << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(kTop + h) << "\" x2=\"" << num(px(v)) << "\" y2=\""
        << num(kTop + h + 4) << "\" stroke=\"#000000\"/>\n";
    svg << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kTop + h + 17) << "\" text-anchor=\"middle\">"
        << format_double(v) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"" << num(kPanelH - 8) << "\" text-anchor=\"middle\">n</text>\n";
  svg << "<text transform=\"translate(14," << num(kTop + h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(axis_label(spec.metric)) << "</text>\n";

  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const std::string& stroke, bool dashed) {
    if (pts.size() < 2) return;
    svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << (dashed ? "1.2" : "2") << "\"";
    if (dashed) svg << " stroke-dasharray=\"6 4\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) svg << (i ? " " : "") << num(px(pts[i].first)) << "," << num(py(pts[i].second));
    svg << "\"/>\n";
  };

  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const auto& s = panel.series[si];
    const std::string c = color(s.estimator, si);
    std::vector<std::pair<double, double>> mean, lo, hi;
    for (const auto& pt : s.points) {
      if (std::isfinite(pt.y)) mean.emplace_back(pt.n, pt.y);
      if (spec.bands && std::isfinite(pt.lo)) lo.emplace_back(pt.n, pt.lo);
      if (spec.bands && std::isfinite(pt.hi)) hi.emplace_back(pt.n, pt.hi);
    }
    svg << "<g class=\"series\" data-estimator=\"" << escape(s.estimator) << "\">\n";
    polyline(mean, c, false);
    polyline(lo, c, true);
    polyline(hi, c, true);
    for (const auto& [n, y] : mean)
      svg << "<circle cx=\"" << num(px(n)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    svg << "</g>\n";
  }

  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const double ly = kTop + 14 + 16 * static_cast<double>(si);
    const double lx = kLeft + w - 86;
    const std::string c = color(panel.series[si].estimator, si);
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 22) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly) << "\">" << escape(panel.series[si].estimator)
        << "</text>\n";
  }
  svg << "</g>\n";
}

std::string document(const std::vector<const Panel*>& panels, const Range& yr, const ChartSpec& spec) {
  const std::size_t k = panels.size();
  const std::size_t cols = k <= 3 ? k : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k))));
  const std::size_t rows = (k + cols - 1) / cols;
  const double width = kPanelW * static_cast<double>(cols);
  const double height = kPanelH * static_cast<double>(rows);
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << " " << num(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < k; ++i)
    draw_panel(svg, kPanelW * static_cast<double>(i % cols), kPanelH * static_cast<double>(i / cols), *panels[i], yr,
               spec);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::string> missing_columns(const CsvTable& table, const ChartSpec& spec) {
  std::vector<std::string> need = {"estimator", "n", "p", "rho", spec.metric};
  if (spec.bands) {
    need.push_back("ci_lo_l2");
    need.push_back("ci_hi_l2");
  }
  std::vector<std::string> missing;
  for (const auto& c : need)
    if (table.column(c) < 0) missing.push_back(c);
  return missing;
}

std::vector<Figure> render_charts(const CsvTable& table, const ChartSpec& spec) {
  const auto missing = missing_columns(table, spec);
  if (!missing.empty()) throw std::invalid_argument("results CSV lacks column " + missing.front());
  const int est_col = table.column("estimator");
  const auto n = table.numeric("n");
  const auto p = table.numeric("p");
  const auto rho = table.numeric("rho");
  const auto y = table.numeric(spec.metric);
  std::vector<double> lo(n.size(), NAN), hi(n.size(), NAN);
  if (spec.bands) {
    lo = table.numeric("ci_lo_l2");
    hi = table.numeric("ci_hi_l2");
  }

  std::vector<std::string> estimators;
  std::map<std::pair<double, double>, std::map<std::string, std::vector<Point>>> cells;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string& e = table.rows[i][static_cast<std::size_t>(est_col)];
    if (std::find(estimators.begin(), estimators.end(), e) == estimators.end()) estimators.push_back(e);
    cells[{p[i], rho[i]}][e].push_back(Point{n[i], y[i], lo[i], hi[i]});
  }

  std::vector<Panel> panels;
  for (auto& [key, by_est] : cells) {
    Panel panel;
    panel.p = key.first;
    panel.rho = key.second;
    for (const auto& e : estimators) {
      auto it = by_est.find(e);
      if (it == by_est.end()) continue;
      auto pts = it->second;
      std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.n < b.n; });
      panel.series.push_back(Series{e, std::move(pts)});
    }
    panels.push_back(std::move(panel));
  }

  const Range yr = y_range(panels, spec);
  std::vector<Figure> figures;
  for (const auto& panel : panels)
    figures.push_back({spec.metric + "_p" + format_double(panel.p) + "_rho" + format_double(panel.rho),
                       document({&panel}, yr, spec)});
  for (std::size_t i = 0; i < panels.size();) {
    std::vector<const Panel*> group;
    const double pv = panels[i].p;
    for (; i < panels.size() && panels[i].p == pv; ++i) group.push_back(&panels[i]);
    figures.push_back({spec.metric + "_p" + format_double(pv), document(group, yr, spec)});
  }
  return figures;
}

}  // namespace whitelasso::cli
