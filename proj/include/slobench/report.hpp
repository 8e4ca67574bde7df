#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "slobench/runlog.hpp"

namespace slobench {

// Pixel mapping for the compliance charts; exposed so tests can invert it.
struct ChartGeometry {
  double width = 860.0;
  double height = 420.0;
  double margin_left = 60.0;
  double margin_right = 150.0;  // room for the legend
  double margin_top = 20.0;
  double margin_bottom = 45.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.05;

  double plot_w() const { return width - margin_left - margin_right; }
  double plot_h() const { return height - margin_top - margin_bottom; }
  double x_px(double x) const { return margin_left + (x / x_max) * plot_w(); }
  double y_px(double y) const {
    return margin_top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h();
  }
  double y_from_px(double px) const {
    return y_min + (1.0 - (px - margin_top) / plot_h()) * (y_max - y_min);
  }
};

inline std::string agent_color(const std::string& agent) {
  if (agent == "aif") return "#1f77b4";
  if (agent == "dqn") return "#d62728";
  if (agent == "a2c") return "#2ca02c";
  if (agent == "ppo") return "#9467bd";
  return "#7f7f7f";
}

namespace detail {

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

// One scenario chart: per agent a smoothed mean-compliance curve with a
// translucent band of one smoothed standard deviation, plus the horizontal
// "Exp." line at the brute-force best configuration's value.
inline std::string render_chart(const std::string& scenario,
                                const std::vector<const RunLog*>& runs) {
  require(!runs.empty(), "chart needs at least one run");
  ChartGeometry g;
  std::size_t longest = 1;
  for (const auto* run : runs) longest = std::max(longest, run->mu_smoothed.size());
  g.x_max = static_cast<double>(std::max<std::size_t>(longest - 1, 1));

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::px(g.width) +
         "\" height=\"" + detail::px(g.height) + "\" viewBox=\"0 0 " + detail::px(g.width) + " " +
         detail::px(g.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::px(g.margin_left) + "\" y=\"14\" font-size=\"13\">" + scenario +
         ": SLO compliance during evaluation</text>\n";

  // axes and ticks
  svg += "<line x1=\"" + detail::px(g.margin_left) + "\" y1=\"" + detail::px(g.y_px(g.y_min)) +
         "\" x2=\"" + detail::px(g.margin_left + g.plot_w()) + "\" y2=\"" +
         detail::px(g.y_px(g.y_min)) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::px(g.margin_left) + "\" y1=\"" + detail::px(g.y_px(g.y_min)) +
         "\" x2=\"" + detail::px(g.margin_left) + "\" y2=\"" + detail::px(g.y_px(g.y_max)) +
         "\" stroke=\"black\"/>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    svg += "<line x1=\"" + detail::px(g.margin_left - 4) + "\" y1=\"" + detail::px(g.y_px(tick)) +
           "\" x2=\"" + detail::px(g.margin_left) + "\" y2=\"" + detail::px(g.y_px(tick)) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::px(g.margin_left - 36) + "\" y=\"" +
           detail::px(g.y_px(tick) + 4) + "\" font-size=\"11\">" + detail::px(tick) + "</text>\n";
  }
  svg += "<text x=\"" + detail::px(g.margin_left + g.plot_w() / 2 - 40) + "\" y=\"" +
         detail::px(g.height - 8) + "\" font-size=\"11\">evaluation batch</text>\n";

  double legend_y = g.margin_top + 12;
  double oracle_value = -1.0;
  for (const auto* run : runs) oracle_value = std::max(oracle_value, run->meta.oracle_value);

  for (const auto* run : runs) {
    const std::string color = agent_color(run->meta.agent);
    const auto sigma_smoothed = smooth(run->sigma_all);
    const std::size_t n = run->mu_smoothed.size();
    if (n == 0) continue;

    std::string band = "<path d=\"M";
    for (std::size_t i = 0; i < n; ++i) {
      const double y = std::min(g.y_max, run->mu_smoothed[i] + sigma_smoothed[i]);
      band += detail::px(g.x_px(static_cast<double>(i))) + " " + detail::px(g.y_px(y)) + " L";
    }
    for (std::size_t i = n; i-- > 0;) {
      const double y = std::max(g.y_min, run->mu_smoothed[i] - sigma_smoothed[i]);
      band += detail::px(g.x_px(static_cast<double>(i))) + " " + detail::px(g.y_px(y));
      if (i > 0) band += " L";
    }
    band += " Z\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += band;

    std::string line = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      line += detail::px(g.x_px(static_cast<double>(i))) + "," +
              detail::px(g.y_px(run->mu_smoothed[i])) + " ";
    }
    line += "\"/>\n";
    svg += line;

    svg += "<line x1=\"" + detail::px(g.width - g.margin_right + 8) + "\" y1=\"" +
           detail::px(legend_y - 4) + "\" x2=\"" + detail::px(g.width - g.margin_right + 28) +
           "\" y2=\"" + detail::px(legend_y - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::px(g.width - g.margin_right + 34) + "\" y=\"" +
           detail::px(legend_y) + "\" font-size=\"12\">" + run->meta.agent + "</text>\n";
    legend_y += 18;
  }

  if (oracle_value >= 0.0) {
    svg += "<line x1=\"" + detail::px(g.margin_left) + "\" y1=\"" +
           detail::px(g.y_px(oracle_value)) + "\" x2=\"" + detail::px(g.margin_left + g.plot_w()) +
           "\" y2=\"" + detail::px(g.y_px(oracle_value)) +
           "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
    svg += "<text x=\"" + detail::px(g.width - g.margin_right + 8) + "\" y=\"" +
           detail::px(legend_y) + "\" font-size=\"12\">Exp. " + detail::px(oracle_value) +
           "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

// First smoothed-mean batch index reaching the fraction of the oracle value;
// -1 when the run never gets there.
inline long batches_to_fraction(const RunLog& run, double fraction) {
  const double bar = fraction * run.meta.oracle_value;
  for (std::size_t i = 0; i < run.mu_smoothed.size(); ++i)
    if (run.mu_smoothed[i] >= bar) return static_cast<long>(i);
  return -1;
}

// Renders one SVG per scenario plus a flat summary over all runs. Charts are
// derived purely from the persisted run directories.
inline void write_report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir) {
  require(!run_dirs.empty(), "report needs at least one run directory");
  std::vector<RunLog> runs;
  runs.reserve(run_dirs.size());
  for (const auto& dir : run_dirs) runs.push_back(RunLog::load(dir));

  std::map<std::string, std::vector<const RunLog*>> by_scenario;
  std::map<std::pair<std::string, std::string>, int> seen;
  for (const auto& run : runs) {
    if (++seen[{run.meta.scenario, run.meta.agent}] > 1)
      throw config_error("duplicate runs for (" + run.meta.scenario + ", " + run.meta.agent +
                         ") cannot share one chart");
    by_scenario[run.meta.scenario].push_back(&run);
  }

  fs::create_directories(out_dir);
  for (const auto& [scenario, group] : by_scenario)
    write_file(out_dir / (scenario + ".svg"), render_chart(scenario, group));

  std::string csv =
      "scenario,agent,final_smoothed_mu,batches_to_95pct_oracle,peak_rss_bytes,mean_cpu_ms_per_"
      "batch\n";
  for (const auto& run : runs) {
    long long peak_rss = 0;
    double cpu_total = 0.0;
    long cpu_n = 0;
    for (const auto& r : run.resources) {
      if (r.rss_bytes) peak_rss = std::max(peak_rss, *r.rss_bytes);
      if (r.cpu_ms_delta) {
        cpu_total += *r.cpu_ms_delta;
        ++cpu_n;
      }
    }
    csv += run.meta.scenario + "," + run.meta.agent + ",";
    csv += run.mu_smoothed.empty() ? "" : fmt_double(run.mu_smoothed.back());
    csv += ",";
    csv += std::to_string(batches_to_fraction(run, 0.95));
    csv += ",";
    csv += std::to_string(peak_rss);
    csv += ",";
    csv += cpu_n > 0 ? fmt_double(cpu_total / cpu_n) : "";
    csv += "\n";
  }
  write_file(out_dir / "summary.csv", csv);
}

}  // namespace slobench
