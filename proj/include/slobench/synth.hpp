#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "slobench/actions.hpp"
#include "slobench/metrics.hpp"
#include "slobench/rng.hpp"

namespace slobench {

// Portrait phone canvas carved into a near-square grid of 1:1 tiles, one per
// stream. Tile side in pixels determines the render scale factor.
struct TileLayout {
  int cols = 1;
  int rows = 1;
  double side = 0.0;
};

inline constexpr double kScreenW = 390.0;
inline constexpr double kScreenH = 780.0;

inline TileLayout tile_layout(int num_streams) {
  require(num_streams >= 1, "stream count must be positive");
  TileLayout t;
  t.cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_streams))));
  t.rows = (num_streams + t.cols - 1) / t.cols;
  t.side = std::min(kScreenW / t.cols, kScreenH / t.rows);
  return t;
}

inline double render_scale_for(int num_streams, int resolution) {
  return tile_layout(num_streams).side / resolution;
}

// Tunables of the synthetic metric model. Coefficients are normalized so the
// largest configuration averages 90% of the cpu/memory reference budgets, and
// chosen so the SLO trade-off stays two-sided: large configurations break the
// QoS targets, small ones break the QoE targets.
struct SynthParams {
  double bits_per_pixel = 0.08;
  double latency_base_s = 0.015;
  double latency_per_pixel_rate = 3.5e-10;
  double cpu_peak_ratio = 0.9;
  double mem_peak_ratio = 0.9;
  double hot_cpu_threshold = 0.7;
  double hot_thermal_prob = 0.1;
};

inline double pixel_rate(const StreamConfig& c) {
  return static_cast<double>(c.streams) * c.resolution * c.resolution * c.fps;
}

inline double max_pixel_rate() {
  return pixel_rate({kStreamChoices.back(), kResolutionChoices.back(), kFpsChoices.back()});
}

inline double max_stream_pixels() {
  return static_cast<double>(kStreamChoices.back()) * kResolutionChoices.back() *
         kResolutionChoices.back();
}

// One second of simulated frames for a configuration: nominal inter-arrival
// 1/fps with multiplicative lognormal jitter, frame sizes from the pixel
// budget. Under a bandwidth cap all inter-arrival gaps inflate by the factor
// that brings the measured throughput down to the cap (queueing).
inline FrameTrace generate_frame_trace(const StreamConfig& config, double noise_sigma,
                                       std::optional<double> bandwidth_cap_bps, Rng& rng,
                                       const SynthParams& params = {}) {
  if (!is_legal(config)) throw std::domain_error("configuration outside the action space");
  const int n = config.streams;
  const int t = std::max(2, config.fps);  // at least two timesteps per window
  const double nominal_gap = 1.0 / config.fps;
  const double nominal_bytes =
      static_cast<double>(config.resolution) * config.resolution * params.bits_per_pixel / 8.0;
  const double tile_side = tile_layout(n).side;

  FrameTrace trace;
  trace.capture_s.assign(n, std::vector<double>(t));
  trace.frame_bytes.assign(n, std::vector<double>(t));
  trace.render_w.assign(n, std::vector<double>(t, tile_side));
  trace.render_h.assign(n, std::vector<double>(t, tile_side));
  trace.source_w.assign(n, std::vector<double>(t, static_cast<double>(config.resolution)));
  trace.source_h.assign(n, std::vector<double>(t, static_cast<double>(config.resolution)));

  for (int i = 0; i < n; ++i) {
    double clock = 0.0;
    for (int k = 0; k < t; ++k) {
      clock += nominal_gap * rng.lognormal_factor(noise_sigma);
      trace.capture_s[i][k] = clock;
      trace.frame_bytes[i][k] = nominal_bytes * rng.lognormal_factor(noise_sigma);
    }
  }

  if (bandwidth_cap_bps) {
    // Measured per-frame byte rate averaged over streams and timesteps.
    double tp = 0.0;
    for (int k = 1; k < t; ++k)
      for (int i = 0; i < n; ++i)
        tp += trace.frame_bytes[i][k] / (trace.capture_s[i][k] - trace.capture_s[i][k - 1]);
    tp /= static_cast<double>(n) * (t - 1);
    if (tp > *bandwidth_cap_bps) {
      const double stretch = tp / *bandwidth_cap_bps;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < t; ++k) trace.capture_s[i][k] *= stretch;
    }
  }
  return trace;
}

// Direct synthetic metric model: cpu tracks the decoded pixel rate, memory
// the resident stream pixels, latency a base cost plus a pixel-rate term.
// Bandwidth capping and thermal drift are applied downstream as scenario
// transformations. Thermal stays mostly nominal here, with an occasional
// fair state when cpu runs hot.
inline MetricsSample synth_sample(const StreamConfig& config, double noise_sigma, Rng& rng,
                                  const SynthParams& params = {}) {
  if (!is_legal(config)) throw std::domain_error("configuration outside the action space");
  const double pr = pixel_rate(config);

  MetricsSample m;
  m.throughput_bps = pr * params.bits_per_pixel / 8.0 * rng.lognormal_factor(noise_sigma);
  m.latency_s = (params.latency_base_s + params.latency_per_pixel_rate * pr) *
                rng.lognormal_factor(noise_sigma);
  m.cpu = params.cpu_peak_ratio * pr / max_pixel_rate() * rng.lognormal_factor(noise_sigma);
  m.mem = params.mem_peak_ratio *
          (static_cast<double>(config.streams) * config.resolution * config.resolution) /
          max_stream_pixels() * rng.lognormal_factor(noise_sigma);
  m.render_scale = render_scale_for(config.streams, config.resolution);
  m.thermal = 0;
  if (noise_sigma > 0.0 && m.cpu > params.hot_cpu_threshold &&
      rng.uniform() < params.hot_thermal_prob) {
    m.thermal = 1;
  }
  m.stream_count = config.streams;
  return m;
}

}  // namespace slobench
