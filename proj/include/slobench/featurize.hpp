#pragma once

#include <array>

#include "slobench/actions.hpp"
#include "slobench/dataset.hpp"
#include "slobench/metrics.hpp"

namespace slobench {

// Agent observation layout: 5 z-scored continuous metrics, then one-hot
// blocks for thermal state (4), streams (6), resolution (3), fps (6).
inline constexpr int kObservationSize = 24;
using Observation = std::array<double, kObservationSize>;

inline Observation featurize(const MetricsSample& m, int action_index, const FeatureStats& stats) {
  const StreamConfig cfg = action_config(action_index);  // validates the index
  if (m.thermal < 0 || m.thermal > 3) throw std::domain_error("thermal state out of range");

  Observation obs{};
  const auto values = continuous_values(m);
  for (int k = 0; k < kNumContinuousMetrics; ++k) {
    const double centered = values[k] - stats.mean[k];
    // Zero-variance features pass through centered.
    obs[k] = stats.stddev[k] > 0.0 ? centered / stats.stddev[k] : centered;
  }
  obs[5 + m.thermal] = 1.0;
  obs[9 + streams_axis_index(cfg.streams)] = 1.0;
  obs[15 + resolution_axis_index(cfg.resolution)] = 1.0;
  obs[18 + fps_axis_index(cfg.fps)] = 1.0;
  return obs;
}

}  // namespace slobench
