#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "slobench/errors.hpp"
#include "slobench/metrics.hpp"

namespace slobench {

// Exactly one side of the bound is defined.
struct SloBound {
  std::optional<double> max;
  std::optional<double> min;

  static SloBound at_most(double v) { return {v, std::nullopt}; }
  static SloBound at_least(double v) { return {std::nullopt, v}; }
};

// Compliance level in [0,1] for one metric against a one-sided bound.
// A zero reading under an upper bound counts as fully compliant; the ratio
// is undefined there and zero usage trivially satisfies the budget.
inline double slo_level(double value, const SloBound& bound) {
  require(bound.max.has_value() != bound.min.has_value(),
          "exactly one side of an SLO bound must be defined");
  if (value < 0.0) throw std::domain_error("negative metric value");
  if (bound.max) {
    if (value == 0.0) return 1.0;
    return std::min(1.0, *bound.max / value);
  }
  return std::min(1.0, value / *bound.min);
}

// The five per-metric targets of one experiment row. 1 Mb/s = 125,000 bytes/s
// (decimal megabits).
struct SloThresholds {
  double throughput_max_bps = 1'250'000.0;
  double latency_max_s = 1.0 / 15.0;
  double stream_min = 5.0;
  double render_scale_max = 1.6;
  int thermal_max = 1;
};

struct ComplianceBreakdown {
  double s_rs = 0.0;
  double s_sf = 0.0;
  double s_lat = 0.0;
  double s_tp = 0.0;
  double s_ts = 0.0;
  double s_qoe = 0.0;
  double s_qos = 0.0;
  double s_overall = 0.0;
};

inline ComplianceBreakdown compliance(const MetricsSample& m, const SloThresholds& slos) {
  ComplianceBreakdown b;
  b.s_rs = slo_level(m.render_scale, SloBound::at_most(slos.render_scale_max));
  b.s_sf = slo_level(static_cast<double>(m.stream_count), SloBound::at_least(slos.stream_min));
  b.s_lat = slo_level(m.latency_s, SloBound::at_most(slos.latency_max_s));
  b.s_tp = slo_level(m.throughput_bps, SloBound::at_most(slos.throughput_max_bps));
  b.s_ts = slo_level(static_cast<double>(m.thermal),
                     SloBound::at_most(static_cast<double>(slos.thermal_max)));
  b.s_qoe = (b.s_rs + b.s_sf) / 2.0;
  b.s_qos = (b.s_lat + b.s_tp + b.s_ts) / 3.0;
  b.s_overall = (b.s_qoe + b.s_qos) / 2.0;
  return b;
}

// The training signal is the overall compliance level itself.
inline double reward(const ComplianceBreakdown& b) { return b.s_overall; }

inline constexpr double kBytesPerSecPerMbit = 1'000'000.0 / 8.0;
inline constexpr double kBytesPerSecPerKbit = 1'000.0 / 8.0;

// Named threshold sets, one per experiment.
inline SloThresholds slo_preset(std::string_view name) {
  if (name == "basic" || name == "instant-shift" || name == "gradual-1" || name == "gradual-2") {
    return SloThresholds{10.0 * kBytesPerSecPerMbit, 1.0 / 15.0, 5.0, 1.6, 1};
  }
  if (name == "slo-change-1") {
    return SloThresholds{256.0 * kBytesPerSecPerKbit, 1.0 / 30.0, 20.0, 0.25, 1};
  }
  if (name == "slo-change-2") {
    return SloThresholds{5.0 * kBytesPerSecPerMbit, 1.0 / 15.0, 10.0, 1.0, 1};
  }
  throw config_error("unknown SLO preset: " + std::string(name));
}

}  // namespace slobench
