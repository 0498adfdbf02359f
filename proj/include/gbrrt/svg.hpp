#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gbrrt/bench.hpp"

namespace gbrrt::svg {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

/// Minimal SVG writer with a world-to-pixel transform (y up).
class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1, double width = 640.0, double margin = 40.0)
      : x0_(x0), y0_(y0), margin_(margin) {
    sx_ = (width - 2 * margin) / (x1 - x0);
    sy_ = sx_;
    w_ = width;
    h_ = (y1 - y0) * sy_ + 2 * margin;
  }
  Canvas(double x0, double x1, double y0, double y1, double width, double height, double margin)
      : x0_(x0), y0_(y0), margin_(margin), w_(width), h_(height) {
    sx_ = (width - 2 * margin) / (x1 - x0);
    sy_ = (height - 2 * margin) / (y1 - y0);
  }

  double px(double x) const { return margin_ + (x - x0_) * sx_; }
  double py(double y) const { return h_ - margin_ - (y - y0_) * sy_; }
  double scale() const { return sx_; }

  void rect(double xa, double ya, double xb, double yb, const std::string& style) {
    body_ << "<rect x=\"" << num(px(std::min(xa, xb))) << "\" y=\"" << num(py(std::max(ya, yb))) << "\" width=\""
          << num(std::abs(xb - xa) * sx_) << "\" height=\"" << num(std::abs(yb - ya) * sy_) << "\" " << style << "/>\n";
  }
  void circle(double x, double y, double r_px, const std::string& style) {
    body_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << num(r_px) << "\" " << style
          << "/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    if (pts.size() < 2) return;
    body_ << "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      body_ << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    body_ << "\" fill=\"none\" " << style << "/>\n";
  }
  void text(double x_px, double y_px, const std::string& s, const std::string& extra = {}) {
    body_ << "<text x=\"" << num(x_px) << "\" y=\"" << num(y_px) << "\" font-family=\"sans-serif\" font-size=\"12\" "
          << extra << ">" << s << "</text>\n";
  }
  void raw(const std::string& s) { body_ << s; }

  std::string str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
       << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double x0_, y0_, margin_;
  double sx_ = 1.0, sy_ = 1.0, w_ = 0.0, h_ = 0.0;
  std::ostringstream body_;
};

inline void draw_edge(Canvas& c, const Edge& e, std::size_t dx, std::size_t dy, const std::string& style) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < e.sample_count(); ++i) pts.emplace_back(e.sample(i)[dx], e.sample(i)[dy]);
  c.polyline(pts, style);
}

/// Top-down view of a planner run: obstacles, both trees and the path,
/// projected onto the first two positional dimensions.
inline std::string render_run(const PlannerRun& run, const Scenario& sc, const SystemModel& m,
                              const std::optional<Path>& path) {
  const auto& pd = m.positional_dims();
  const std::size_t dx = pd.at(0), dy = pd.size() > 1 ? pd[1] : (dx + 1) % m.state_dim();
  Canvas c(sc.bounds.lo[dx], sc.bounds.hi[dx], sc.bounds.lo[dy], sc.bounds.hi[dy]);
  c.rect(sc.bounds.lo[dx], sc.bounds.lo[dy], sc.bounds.hi[dx], sc.bounds.hi[dy], "fill=\"none\" stroke=\"black\"");
  for (const auto& o : sc.obstacles) {
    const std::string style = "fill=\"#888\" fill-opacity=\"0.6\" stroke=\"none\"";
    if (const auto* b = std::get_if<BoxObstacle>(&o)) {
      c.rect(b->lo[0], b->lo[1], b->hi[0], b->hi[1], style);
    } else if (const auto* cy = std::get_if<CylinderObstacle>(&o)) {
      c.circle(cy->cx, cy->cy, cy->radius * c.scale(), style);
    } else if (const auto* s = std::get_if<SphereObstacle>(&o)) {
      c.circle(s->center[0], s->center.size() > 1 ? s->center[1] : 0.0, s->radius * c.scale(), style);
    }
  }
  for (const auto& n : run.forward.nodes())
    if (n.edge) draw_edge(c, *n.edge, dx, dy, "stroke=\"#1f77b4\" stroke-width=\"0.6\"");
  if (run.reverse)
    for (const auto& n : run.reverse->nodes())
      if (n.edge) {
        if (n.edge->sample_count() >= 2 && n.edge->sample(0).size() == m.state_dim())
          draw_edge(c, *n.edge, dx, dy, "stroke=\"#d62728\" stroke-width=\"0.6\"");
      }
  if (path)
    for (const auto& e : path->edges) draw_edge(c, e, dx, dy, "stroke=\"#2ca02c\" stroke-width=\"2.5\"");
  c.circle(sc.start[dx], sc.start[dy], 5, "fill=\"#1f77b4\"");
  c.circle(sc.goal[dx], sc.goal[dy], 5, "fill=\"#d62728\"");
  c.text(8, 16, sc.id + " / " + to_string(run.kind()));
  return c.str();
}

/// Per-planner solution-time curves from a results CSV: for every planner,
/// solved fraction against time.
inline std::string render_csv(std::istream& in) {
  std::map<std::string, std::vector<double>> solved;  // planner -> sorted solve times
  std::map<std::string, std::size_t> totals;
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line);
    if (header.empty()) {
      header = f;
      continue;
    }
    if (f.size() != header.size()) throw ValidationError("csv: row has " + std::to_string(f.size()) + " fields");
    auto col = [&](const char* n) {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == n) return f[i];
      throw ValidationError(std::string("csv: missing column ") + n);
    };
    const std::string p = col("planner");
    ++totals[p];
    if (col("success") == "1" && col("solution_time_s") != "-") solved[p].push_back(std::stod(col("solution_time_s")));
  }
  if (totals.empty()) throw ValidationError("csv: no trials");
  double tmax = 1e-3;
  for (auto& [p, v] : solved) {
    std::sort(v.begin(), v.end());
    if (!v.empty()) tmax = std::max(tmax, v.back());
  }
  Canvas c(0.0, tmax, 0.0, 1.0, 640, 400, 50);
  c.rect(0.0, 0.0, tmax, 1.0, "fill=\"none\" stroke=\"black\"");
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::size_t k = 0;
  for (const auto& [p, n] : totals) {
    const auto& v = solved[p];
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (std::size_t i = 0; i < v.size(); ++i) {
      pts.emplace_back(v[i], static_cast<double>(i) / static_cast<double>(n));
      pts.emplace_back(v[i], static_cast<double>(i + 1) / static_cast<double>(n));
    }
    pts.emplace_back(tmax, static_cast<double>(v.size()) / static_cast<double>(n));
    const std::string color = colors[k % 7];
    c.polyline(pts, "stroke=\"" + color + "\" stroke-width=\"1.5\"");
    c.text(60, 70 + 16.0 * static_cast<double>(k), p, "fill=\"" + color + "\"");
    ++k;
  }
  c.text(280, 392, "solution time [s] (max " + num(tmax) + ")");
  c.text(4, 200, "solved");
  return c.str();
}

/// Heatmap of mean solution time over the first two sweep axes (or a strip
/// for a single axis). Log axes place cells at log-spaced positions.
inline std::string render_sweep(const SweepSpec& spec, const std::vector<SweepPoint>& grid) {
  const SweepAxis& ax = spec.axes[0];
  const SweepAxis* ay = spec.axes.size() > 1 ? &spec.axes[1] : nullptr;
  auto pos = [](const SweepAxis& a, double v) { return a.log_scale() ? std::log10(v) : v; };
  auto extent = [&](const SweepAxis& a) {
    double lo = pos(a, a.values.front()), hi = lo;
    for (double v : a.values) lo = std::min(lo, pos(a, v)), hi = std::max(hi, pos(a, v));
    const double pad = a.values.size() > 1 ? (hi - lo) / (2.0 * static_cast<double>(a.values.size() - 1)) : 0.5;
    return std::pair{lo - pad, hi + pad};
  };
  const auto [x0, x1] = extent(ax);
  const auto [y0, y1] = ay ? extent(*ay) : std::pair{0.0, 1.0};
  Canvas c(x0, x1, y0, y1, 640, 480, 60);
  double tmin = 1e300, tmax = -1e300;
  for (const auto& p : grid) tmin = std::min(tmin, p.summary.mean_time), tmax = std::max(tmax, p.summary.mean_time);
  const double cw = (x1 - x0) / static_cast<double>(ax.values.size());
  const double ch = ay ? (y1 - y0) / static_cast<double>(ay->values.size()) : 1.0;
  for (const auto& p : grid) {
    if (spec.axes.size() > 2 && (p.coords[2] != spec.axes[2].values.front())) continue;
    const double f = tmax > tmin ? (p.summary.mean_time - tmin) / (tmax - tmin) : 0.0;
    const int r = static_cast<int>(255 * f), b = static_cast<int>(255 * (1 - f));
    char fill[32];
    std::snprintf(fill, sizeof fill, "#%02x40%02x", r, b);
    const double cx = pos(ax, p.coords[0]);
    const double cy = ay ? pos(*ay, p.coords[1]) : 0.5;
    c.rect(cx - cw / 2, cy - ch / 2, cx + cw / 2, cy + ch / 2, std::string("fill=\"") + fill + "\" stroke=\"white\"");
    c.text(c.px(cx) - 14, c.py(cy) + 4, num(p.summary.mean_time), "fill=\"white\" font-size=\"10\"");
  }
  c.text(260, 472, ax.name + (ax.log_scale() ? " (log)" : ""));
  if (ay) c.text(4, 30, ay->name + (ay->log_scale() ? " (log)" : ""));
  c.text(400, 20, "mean solution time [s]");
  return c.str();
}

}  // namespace gbrrt::svg
