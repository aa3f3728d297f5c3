#include "enspace/plot.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "enspace/errors.hpp"

namespace enspace {
namespace {

constexpr double kWidth = 760, kPanelH = 170, kLeft = 70, kRight = 20;
constexpr double kTop = 48, kGap = 34;
constexpr std::size_t kMaxBuckets = 1200;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b"};

struct Panel {
  const char* label;
  std::function<double(const TrajectoryRow&)> value;
  bool show_ref = false;
};

std::vector<Panel> panels_for(PlantKind plant) {
  if (plant == PlantKind::rlc) {
    return {{"i1 [A]", [](const TrajectoryRow& r) { return r.x0; }},
            {"v1 [V]", [](const TrajectoryRow& r) { return r.x1; }, true},
            {"u [V]", [](const TrajectoryRow& r) { return r.u; }}};
  }
  return {{"P_load [W]", [](const TrajectoryRow& r) { return r.P_load; }},
          {"omega1 [rad/s]", [](const TrajectoryRow& r) { return r.x0; }, true},
          {"Pm1 [W]", [](const TrajectoryRow& r) { return r.x1; }},
          {"a [-]", [](const TrajectoryRow& r) { return r.u; }}};
}

// Min/max per time bucket keeps chatter visible after decimation.
std::vector<std::pair<double, double>> decimate(
    const std::vector<TrajectoryRow>& rows,
    const std::function<double(const TrajectoryRow&)>& f) {
  std::vector<std::pair<double, double>> pts;
  if (rows.size() <= 2 * kMaxBuckets) {
    for (const auto& r : rows) pts.emplace_back(r.t, f(r));
    return pts;
  }
  const std::size_t per = rows.size() / kMaxBuckets + 1;
  for (std::size_t b = 0; b < rows.size(); b += per) {
    const std::size_t e = std::min(rows.size(), b + per);
    std::size_t lo = b, hi = b;
    for (std::size_t k = b; k < e; ++k) {
      if (f(rows[k]) < f(rows[lo])) lo = k;
      if (f(rows[k]) > f(rows[hi])) hi = k;
    }
    const auto [first, second] = std::minmax(lo, hi);
    pts.emplace_back(rows[first].t, f(rows[first]));
    if (second != first) pts.emplace_back(rows[second].t, f(rows[second]));
  }
  return pts;
}

std::string tick_label(double v) { return fmt::format("{:.6g}", v); }

}  // namespace

std::string render_figure(const std::vector<PlotSeries>& series,
                          const std::string& title) {
  if (series.empty()) throw InvalidInput("render_figure: no series");
  const PlantKind plant = series.front().traj->plant;
  for (const auto& s : series) {
    if (s.traj == nullptr || s.traj->plant != plant) {
      throw InvalidInput("render_figure: series mix plant kinds");
    }
  }
  const auto panels = panels_for(plant);
  const double height =
      kTop + static_cast<double>(panels.size()) * (kPanelH + kGap) + 10;

  double t0 = INFINITY, t1 = -INFINITY;
  for (const auto& s : series) {
    if (s.traj->rows.empty()) continue;
    t0 = std::min(t0, s.traj->rows.front().t);
    t1 = std::max(t1, s.traj->rows.back().t);
  }
  if (!(t1 > t0)) t1 = t0 + 1.0;

  std::string o = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"18\" font-size=\"14\">{3}</text>\n",
      kWidth, height, kLeft, title);
  // Legend.
  double lx = kLeft;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    o += fmt::format(
        "<line x1=\"{0}\" y1=\"32\" x2=\"{1}\" y2=\"32\" stroke=\"{2}\" "
        "stroke-width=\"2\"/><text x=\"{3}\" y=\"36\">{4}</text>\n",
        lx, lx + 18, color, lx + 22, series[s].label);
    lx += 30 + 7.0 * static_cast<double>(series[s].label.size());
  }

  const double pw = kWidth - kLeft - kRight;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double top = kTop + static_cast<double>(p) * (kPanelH + kGap);
    std::vector<std::vector<std::pair<double, double>>> data;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : series) {
      data.push_back(decimate(s.traj->rows, panels[p].value));
      for (const auto& [t, v] : data.back()) {
        if (std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (panels[p].show_ref && !s.traj->rows.empty()) {
        lo = std::min(lo, s.traj->rows.front().y_ref);
        hi = std::max(hi, s.traj->rows.front().y_ref);
      }
    }
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (!(hi > lo)) {
      const double pad = std::max(1e-9, 0.05 * std::abs(lo));
      lo -= pad;
      hi += pad;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
    auto X = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
    auto Y = [&](double v) { return top + (hi - v) / (hi - lo) * kPanelH; };

    o += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
        "stroke=\"#444\"/>\n",
        kLeft, top, pw, kPanelH);
    o += fmt::format(
        "<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" "
        "text-anchor=\"middle\">{}</text>\n",
        top + kPanelH / 2, top + kPanelH / 2, panels[p].label);
    for (int k = 0; k <= 4; ++k) {
      const double v = lo + (hi - lo) * k / 4.0;
      o += fmt::format(
          "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" "
          "stroke=\"#ddd\"/><text x=\"{3}\" y=\"{4:.2f}\" "
          "text-anchor=\"end\">{5}</text>\n",
          kLeft, Y(v), kLeft + pw, kLeft - 4, Y(v) + 4, tick_label(v));
      const double t = t0 + (t1 - t0) * k / 4.0;
      o += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
          X(t), top + kPanelH + 14, tick_label(t));
    }
    if (panels[p].show_ref && !series.front().traj->rows.empty()) {
      const double r = series.front().traj->rows.front().y_ref;
      o += fmt::format(
          "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" "
          "stroke=\"#000\" stroke-dasharray=\"5,4\"/>\n",
          kLeft, Y(r), kLeft + pw);
    }
    for (std::size_t s = 0; s < data.size(); ++s) {
      std::string pts;
      for (const auto& [t, v] : data[s]) {
        if (!std::isfinite(v)) continue;
        pts += fmt::format("{:.2f},{:.2f} ", X(t), Y(v));
      }
      o += fmt::format(
          "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.3\" "
          "points=\"{}\"/>\n",
          kColors[s % std::size(kColors)], pts);
    }
  }
  o += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">t [s]</text>\n",
                   kLeft + pw / 2, height - 2);
  o += "</svg>\n";
  return o;
}

}  // namespace enspace
