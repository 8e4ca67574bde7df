#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "slobench/errors.hpp"

namespace slobench {

// One batch-level measurement of the six monitored metrics. cpu and mem are
// ratios against the reference budgets (2 cores, 200 MB); thermal is the
// discrete device state 0..3.
struct MetricsSample {
  double cpu = 0.0;
  double mem = 0.0;
  double throughput_bps = 0.0;
  double latency_s = 0.0;
  double render_scale = 0.0;
  int thermal = 0;
  int stream_count = 0;
};

// Frames received over one measurement window: one row per stream, one column
// per frame timestep. capture_s must be strictly increasing along each row.
struct FrameTrace {
  std::vector<std::vector<double>> capture_s;
  std::vector<std::vector<double>> frame_bytes;
  std::vector<std::vector<double>> render_w;
  std::vector<std::vector<double>> render_h;
  std::vector<std::vector<double>> source_w;
  std::vector<std::vector<double>> source_h;

  int streams() const { return static_cast<int>(capture_s.size()); }
  int timesteps() const { return capture_s.empty() ? 0 : static_cast<int>(capture_s[0].size()); }

  void validate() const {
    const int n = streams();
    require(n >= 1, "trace must contain at least one stream");
    const int t = timesteps();
    require(t >= 2, "malformed trace: fewer than two frame timesteps");
    auto check_shape = [&](const std::vector<std::vector<double>>& m, const char* name) {
      require(static_cast<int>(m.size()) == n, std::string(name) + ": stream count mismatch");
      for (const auto& row : m)
        require(static_cast<int>(row.size()) == t, std::string(name) + ": timestep count mismatch");
    };
    check_shape(capture_s, "capture_s");
    check_shape(frame_bytes, "frame_bytes");
    check_shape(render_w, "render_w");
    check_shape(render_h, "render_h");
    check_shape(source_w, "source_w");
    check_shape(source_h, "source_h");
    for (int i = 0; i < n; ++i) {
      for (int k = 1; k < t; ++k)
        require(capture_s[i][k] > capture_s[i][k - 1],
                "capture timestamps must be strictly increasing");
      for (int k = 0; k < t; ++k) {
        require(frame_bytes[i][k] > 0.0, "frame size must be positive");
        require(render_w[i][k] > 0.0 && render_h[i][k] > 0.0, "render dims must be positive");
        require(source_w[i][k] > 0.0 && source_h[i][k] > 0.0, "source dims must be positive");
      }
    }
  }
};

// Reference budgets used to normalize cpu and memory readings.
struct MetricRefs {
  double cpu_ref = 2.0;    // 200% of one core
  double mem_ref = 200.0;  // MB
};

// Averages a frame trace plus auxiliary per-timestep usage series into one
// MetricsSample. Sums run from the second timestep; cpu/mem/thermal series
// must have one entry per frame timestep.
inline MetricsSample compute_metrics(const FrameTrace& trace, std::span<const double> cpu_usage,
                                     std::span<const double> mem_usage,
                                     std::span<const int> thermal_states, MetricRefs refs = {}) {
  trace.validate();
  const int n = trace.streams();
  const int t = trace.timesteps();
  require(static_cast<int>(cpu_usage.size()) == t, "cpu series length must equal trace timesteps");
  require(static_cast<int>(mem_usage.size()) == t, "mem series length must equal trace timesteps");
  require(static_cast<int>(thermal_states.size()) == t,
          "thermal series length must equal trace timesteps");

  const double alpha = 1.0 / (t - 1);
  const double beta = 1.0 / n;

  double lat = 0.0, tp = 0.0, rs = 0.0, cpu = 0.0, mem = 0.0;
  int ts = 0;
  for (int k = 1; k < t; ++k) {
    double lat_k = 0.0, tp_k = 0.0, rs_k = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gap = trace.capture_s[i][k] - trace.capture_s[i][k - 1];
      lat_k += gap;
      tp_k += trace.frame_bytes[i][k] / gap;
      rs_k += std::sqrt((trace.render_w[i][k] * trace.render_h[i][k]) /
                        (trace.source_w[i][k] * trace.source_h[i][k]));
    }
    lat += beta * lat_k;
    tp += beta * tp_k;
    rs += beta * rs_k;
    cpu += cpu_usage[k] / refs.cpu_ref;
    mem += mem_usage[k] / refs.mem_ref;
    ts = std::max(ts, thermal_states[k]);
  }

  MetricsSample out;
  out.latency_s = alpha * lat;
  out.throughput_bps = alpha * tp;
  out.render_scale = alpha * rs;
  out.cpu = alpha * cpu;
  out.mem = alpha * mem;
  out.thermal = ts;
  out.stream_count = n;
  return out;
}

}  // namespace slobench
