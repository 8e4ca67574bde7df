#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slobench/errors.hpp"
#include "slobench/slo.hpp"

namespace slobench {

enum class DataMode { synthetic, dataset };

inline constexpr long kDeskBudget = 64'000;
inline constexpr long kDeskCadence = 3'200;
inline constexpr long kPaperBudget = 1'280'000;
inline constexpr long kPaperCadence = 6'400;
inline constexpr int kBatchSize = 32;

// Everything needed to instantiate one experiment environment: data source,
// SLO set, and the distribution-shift transformations.
struct ScenarioSpec {
  std::string name = "basic";
  DataMode mode = DataMode::synthetic;
  std::string dataset_path;  // used when mode == dataset
  SloThresholds slos;
  std::optional<double> bandwidth_cap_bps;
  std::optional<double> thermal_cooling_k;  // thermal drift enabled when set
  bool slo_switch = false;                  // SLOs differ from the base scenario's
  double noise_sigma = 0.1;
  long budget = kDeskBudget;
  long cadence = kDeskCadence;
  bool requires_pretrained = false;  // continues from the base scenario checkpoint

  void validate() const {
    if (budget <= 0 || cadence <= 0) throw config_error("budget and cadence must be positive");
    if (budget % cadence != 0) throw config_error("budget must be divisible by the cadence");
    if (cadence % kBatchSize != 0)
      throw config_error("cadence must be divisible by the batch size of 32");
    if (bandwidth_cap_bps && thermal_cooling_k)
      throw config_error("bandwidth cap and thermal drift are mutually exclusive");
    if (bandwidth_cap_bps && *bandwidth_cap_bps <= 0.0)
      throw config_error("bandwidth cap must be positive");
    if (noise_sigma < 0.0) throw config_error("noise sigma must be nonnegative");
    if (mode == DataMode::dataset && dataset_path.empty())
      throw config_error("dataset mode requires a dataset path");
  }
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"basic",     "instant-shift", "gradual-1",
                                              "gradual-2", "slo-change-1",  "slo-change-2"};
  return names;
}

inline ScenarioSpec scenario_preset(std::string_view name) {
  ScenarioSpec s;
  s.name = std::string(name);
  s.slos = slo_preset(name);
  if (name == "basic") {
    return s;
  }
  s.requires_pretrained = true;
  if (name == "instant-shift") {
    s.bandwidth_cap_bps = 1.0 * kBytesPerSecPerMbit;
  } else if (name == "gradual-1") {
    s.thermal_cooling_k = 0.03;
  } else if (name == "gradual-2") {
    s.thermal_cooling_k = 0.07;
  } else if (name == "slo-change-1" || name == "slo-change-2") {
    s.slo_switch = true;
  } else {
    throw config_error("unknown scenario: " + std::string(name));
  }
  return s;
}

}  // namespace slobench
