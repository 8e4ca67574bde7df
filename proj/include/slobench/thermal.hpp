#pragma once

#include <algorithm>
#include <cmath>

#include "slobench/errors.hpp"

namespace slobench {

// Device temperature on a normalized [0,1] scale, driven toward a
// throughput-dependent target by Newton's law of cooling. The discrete state
// reported to agents partitions [0,1] into four equal bins, capped at 3.
class ThermalModel {
 public:
  explicit ThermalModel(double cooling_constant = 0.03, double heat_coef = 0.364,
                        double rate_coef = 0.05)
      : k_(cooling_constant), heat_coef_(heat_coef), rate_coef_(rate_coef) {}

  double target_for(double throughput_bps) const {
    return std::min(1.0, heat_coef_ * std::exp(rate_coef_ * throughput_bps / (1024.0 * 1024.0)));
  }

  // Advances the temperature one step and returns the discrete state 0..3.
  int step(double throughput_bps) {
    const double target = target_for(throughput_bps);
    temp_ = target + (temp_ - target) * std::exp(-k_);
    return discrete_state();
  }

  int discrete_state() const {
    return std::min(3, static_cast<int>(std::floor(4.0 * temp_)));
  }

  double temperature() const { return temp_; }

  void set_temperature(double t) {
    require(t >= 0.0 && t <= 1.0, "temperature outside [0,1]");
    temp_ = t;
  }

  double cooling_constant() const { return k_; }

 private:
  double temp_ = 0.0;
  double k_;
  double heat_coef_;
  double rate_coef_;
};

}  // namespace slobench
