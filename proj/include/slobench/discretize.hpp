#pragma once

#include <cstdint>
#include <stdexcept>

#include "slobench/metrics.hpp"
#include "slobench/slo.hpp"

namespace slobench {

// Batch observations reduced to small ordinal labels for the generative
// model. Metric ratios use five intervals closed above; compliance levels use
// five half-open intervals plus a singleton bin for exact compliance.
struct DiscretizedObservation {
  std::uint8_t cpu_bin = 1;  // 1..5
  std::uint8_t mem_bin = 1;  // 1..5
  std::uint8_t rs_bin = 0;   // 0..5
  std::uint8_t sf_bin = 0;
  std::uint8_t lat_bin = 0;
  std::uint8_t tp_bin = 0;
  std::uint8_t ts_bin = 0;
  std::uint8_t action = 0;  // 0..107

  bool operator==(const DiscretizedObservation&) const = default;
};

// {[0,0.2],(0.2,0.4],(0.4,0.6],(0.6,0.8],(0.8,inf)} -> 1..5
inline std::uint8_t metric_bin(double ratio) {
  if (ratio <= 0.2) return 1;
  if (ratio <= 0.4) return 2;
  if (ratio <= 0.6) return 3;
  if (ratio <= 0.8) return 4;
  return 5;
}

// {[0,0.2),[0.2,0.4),[0.4,0.6),[0.6,0.8),[0.8,1),{1}} -> 0..5
inline std::uint8_t compliance_bin(double level) {
  if (level >= 1.0) return 5;
  if (level < 0.2) return 0;
  if (level < 0.4) return 1;
  if (level < 0.6) return 2;
  if (level < 0.8) return 3;
  return 4;
}

// Representative compliance value of a bin: min(1, 0.2*bin + 0.1).
inline double approx_compliance(int bin) {
  if (bin < 0 || bin > 5) throw std::domain_error("compliance bin out of range");
  const double v = 0.2 * bin + 0.1;
  return v < 1.0 ? v : 1.0;
}

inline DiscretizedObservation discretize(const MetricsSample& m, const ComplianceBreakdown& b,
                                         int action_index) {
  if (action_index < 0 || action_index > 107)
    throw std::domain_error("action index out of range");
  DiscretizedObservation o;
  o.cpu_bin = metric_bin(m.cpu);
  o.mem_bin = metric_bin(m.mem);
  o.rs_bin = compliance_bin(b.s_rs);
  o.sf_bin = compliance_bin(b.s_sf);
  o.lat_bin = compliance_bin(b.s_lat);
  o.tp_bin = compliance_bin(b.s_tp);
  o.ts_bin = compliance_bin(b.s_ts);
  o.action = static_cast<std::uint8_t>(action_index);
  return o;
}

}  // namespace slobench
