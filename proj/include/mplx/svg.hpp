#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mplx/common.hpp"
#include "mplx/metrics.hpp"

namespace mplx {

namespace svg {

inline std::string color_for(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                  "#bcbd22", "#17becf"};
  return palette[i % 10];
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

class Doc {
 public:
  Doc(double width, double height) : w_(width), h_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0, const std::string& dash = "") {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
          << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << fmt(width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double width = 1.5,
                const std::string& dash = "") {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"" << fmt(width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << " points=\"";
    for (auto [x, y] : pts) body_ << fmt(x) << "," << fmt(y) << " ";
    body_ << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill,
              double opacity = 1.0) {
    body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\""
          << fmt(r) << "\" fill=\"" << fill << "\" fill-opacity=\""
          << fmt(opacity) << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none") {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"" << fill
          << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& fill = "#000") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\""
          << fmt(size) << "\" font-family=\"sans-serif\" fill=\"" << fill
          << "\">" << escape(s) << "</text>\n";
  }

  void open_group(const std::string& cls) {
    body_ << "<g class=\"" << cls << "\">\n";
  }
  void close_group() { body_ << "</g>\n"; }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write svg: " + path);
    f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w_)
      << "\" height=\"" << fmt(h_) << "\" viewBox=\"0 0 " << fmt(w_) << " "
      << fmt(h_) << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
      << body_.str() << "</svg>\n";
  }

 private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else if (c == '&') out += "&amp;";
      else out += c;
    }
    return out;
  }
  double w_, h_;
  std::ostringstream body_;
};

/// World -> panel pixel mapping (y flipped).
struct PanelFrame {
  double x0, y0, size, world_radius;
  std::pair<double, double> map(Vec2 p) const {
    double s = size / (2.0 * world_radius);
    return {x0 + (p.x + world_radius) * s, y0 + (world_radius - p.y) * s};
  }
};

/// One arena panel: observed history dotted, ground-truth future solid,
/// predictions as shrinking circles. One <g> per agent.
inline void episode_panel(Doc& doc, const PanelFrame& fr, const Episode& ep,
                          const Tracks& predictions, const ModelConfig& cfg,
                          const std::string& title) {
  doc.open_group("panel");
  doc.rect(fr.x0, fr.y0, fr.size, fr.size, "none", "#999");
  doc.text(fr.x0 + 4, fr.y0 + 14, title);
  std::size_t n = ep.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    doc.open_group("agent");
    std::string c = color_for(i);
    std::vector<std::pair<double, double>> obs, fut;
    for (int t = 0; t < cfg.t_obs; ++t) obs.push_back(fr.map(ep.positions[i][t]));
    for (int t = cfg.t_obs - 1; t < cfg.t_obs + cfg.t_pred; ++t)
      fut.push_back(fr.map(ep.positions[i][t]));
    doc.polyline(obs, c, 1.2, "3,3");
    doc.polyline(fut, c, 1.6);
    for (std::size_t t = 0; t < predictions[i].size(); ++t) {
      auto [x, y] = fr.map(predictions[i][t]);
      double r = 5.0 * (1.0 - 0.7 * static_cast<double>(t) /
                                  static_cast<double>(predictions[i].size()));
      doc.circle(x, y, r, c, 0.45);
    }
    doc.close_group();
  }
  doc.close_group();
}

/// Latent-weight heatmap with per-row sums annotated.
inline void heatmap(Doc& doc, double x0, double y0, double size,
                    const Tensor& z, const std::string& title) {
  std::size_t n = z.rows();
  double cell = size / static_cast<double>(n);
  doc.open_group("heatmap");
  doc.text(x0, y0 - 4, title);
  double zmax = 1e-12;
  for (double v : z.data) zmax = std::max(zmax, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_sum += z.at(i, j);
      int shade = 255 - static_cast<int>(215.0 * std::abs(z.at(i, j)) / zmax);
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02xff", shade, shade);
      doc.rect(x0 + j * cell, y0 + i * cell, cell, cell, color, "#ddd");
    }
    doc.text(x0 + size + 4, y0 + i * cell + cell * 0.7, fmt(row_sum), 9.0, "#555");
  }
  doc.close_group();
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Generic line chart with axes; used for loss curves and sample-efficiency
/// plots.
inline void line_chart(const std::string& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
  if (series.empty()) throw ConfigError("line_chart: no series");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double W = 640, H = 420, L = 70, B = 50, T = 30, R = 140;
  Doc doc(W, H);
  auto mx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto my = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - B - T); };
  doc.text(L, T - 10, title, 13.0);
  doc.line(L, T, L, H - B, "#333");
  doc.line(L, H - B, W - R, H - B, "#333");
  doc.text(W - R - 60, H - 12, x_label, 10.0, "#333");
  doc.text(8, T + 10, y_label, 10.0, "#333");
  for (int g = 0; g <= 4; ++g) {
    double y = ymin + (ymax - ymin) * g / 4.0;
    doc.line(L, my(y), W - R, my(y), "#eee");
    doc.text(6, my(y) + 3, fmt(y), 9.0, "#666");
    double x = xmin + (xmax - xmin) * g / 4.0;
    doc.text(mx(x) - 8, H - B + 14, fmt(x), 9.0, "#666");
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    std::vector<std::pair<double, double>> pts;
    for (auto [x, y] : series[si].points) pts.push_back({mx(x), my(y)});
    doc.polyline(pts, color_for(si), 1.8);
    doc.text(W - R + 8, T + 16.0 * static_cast<double>(si) + 10, series[si].name,
             10.0, color_for(si));
  }
  doc.save(path);
}

}  // namespace svg

/// Side-by-side counterfactual figure: original vs edited rollout plus the
/// latent heatmaps before and after the edit.
inline void counterfactual_svg(const std::string& path, const Episode& ep,
                               const ModelConfig& cfg,
                               const CounterfactualResult& cf) {
  double world = ep.config.arena_radius * ep.config.arena_scale * 1.25;
  const double panel = 320, pad = 20;
  std::size_t k = cf.z_before.size();
  double hm = 120;
  svg::Doc doc(2 * panel + 3 * pad, panel + 2 * pad + (hm + 40) * k);
  svg::PanelFrame left{pad, pad, panel, world};
  svg::PanelFrame right{panel + 2 * pad, pad, panel, world};
  svg::episode_panel(doc, left, ep, cf.original, cfg, "original graph");
  svg::episode_panel(doc, right, ep, cf.edited, cfg, "edited graph");
  for (std::size_t layer = 0; layer < k; ++layer) {
    double y = panel + 2 * pad + 30 + (hm + 40) * static_cast<double>(layer);
    svg::heatmap(doc, pad, y, hm, cf.z_before[layer],
                 "z layer " + std::to_string(layer) + " (before)");
    svg::heatmap(doc, panel + 2 * pad, y, hm, cf.z_after[layer],
                 "z layer " + std::to_string(layer) + " (after)");
  }
  doc.save(path);
}

}  // namespace mplx
