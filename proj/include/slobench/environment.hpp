#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "slobench/actions.hpp"
#include "slobench/dataset.hpp"
#include "slobench/errors.hpp"
#include "slobench/rng.hpp"
#include "slobench/scenario.hpp"
#include "slobench/slo.hpp"
#include "slobench/synth.hpp"
#include "slobench/thermal.hpp"

namespace slobench {

// One environment step as seen by the harness and the agents.
struct StepRecord {
  MetricsSample sample;
  ComplianceBreakdown breakdown;
  double reward = 0.0;
  int action_index = 0;
};

// Seed stream for featurization statistics in synthetic mode. Independent of
// the run seed: statistics are a property of the scenario, as with a dataset
// sidecar.
inline constexpr std::uint64_t kStatsSeed = 0x57a7577a75ULL;
inline constexpr int kStatsSamplesPerConfig = 32;

// Simulated client device for one scenario. Draws metric samples for the
// currently applied configuration (from a dataset with replacement, or the
// synthetic generator), then applies the scenario transformations: bandwidth
// cap and thermal drift. Single-threaded; owns its noise stream.
class Environment {
 public:
  Environment(const ScenarioSpec& spec, std::uint64_t seed, const Dataset* dataset = nullptr)
      : spec_(spec), rng_(derive_seed(seed, "env")), dataset_(dataset) {
    spec_.validate();
    if (spec_.mode == DataMode::dataset) {
      require(dataset_ != nullptr, "dataset mode requires a loaded dataset");
    }
    if (spec_.thermal_cooling_k) thermal_.emplace(*spec_.thermal_cooling_k);
    stats_ = compute_stats();
  }

  const ScenarioSpec& scenario() const { return spec_; }
  const FeatureStats& stats() const { return stats_; }
  int config() const { return config_; }

  void set_config(int action) {
    if (action < 0 || action >= kNumActions)
      throw std::domain_error("action index out of range");
    config_ = action;
  }

  // Threshold swap at a batch boundary; samples drawn afterwards are scored
  // against the new set.
  void set_slos(const SloThresholds& slos) { spec_.slos = slos; }

  StepRecord step() {
    StepRecord rec;
    rec.action_index = config_;
    rec.sample = transform(raw_sample(config_, rng_));
    rec.breakdown = compliance(rec.sample, spec_.slos);
    rec.reward = reward(rec.breakdown);
    return rec;
  }

  // n transformed samples for a configuration, bypassing the applied-config
  // state. Thermal drift still advances, so this is also the stepping core.
  std::vector<MetricsSample> sample_batch(int action, int n) {
    require(n >= 1, "batch size must be positive");
    if (action < 0 || action >= kNumActions)
      throw std::domain_error("action index out of range");
    std::vector<MetricsSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(transform(raw_sample(action, rng_)));
    return out;
  }

 private:
  MetricsSample raw_sample(int action, Rng& rng) {
    if (spec_.mode == DataMode::dataset) {
      const auto& records = dataset_->records_for(action);
      return records[rng.uniform_index(records.size())];
    }
    return synth_sample(action_config(action), spec_.noise_sigma, rng);
  }

  MetricsSample transform(MetricsSample m) {
    if (spec_.bandwidth_cap_bps) m = Dataset::apply_bandwidth_cap(m, *spec_.bandwidth_cap_bps);
    if (thermal_) m.thermal = thermal_->step(m.throughput_bps);
    return m;
  }

  FeatureStats compute_stats() {
    if (spec_.mode == DataMode::dataset) return dataset_->stats();
    // Deterministic pre-pass over the grid. The cap shapes what agents will
    // observe, so it applies here; thermal drift only feeds the categorical
    // feature and is left out.
    Rng rng(derive_seed(kStatsSeed, spec_.name));
    std::vector<MetricsSample> samples;
    samples.reserve(static_cast<std::size_t>(kNumActions) * kStatsSamplesPerConfig);
    for (int a = 0; a < kNumActions; ++a) {
      const StreamConfig cfg = action_config(a);
      for (int i = 0; i < kStatsSamplesPerConfig; ++i) {
        MetricsSample m = synth_sample(cfg, spec_.noise_sigma, rng);
        if (spec_.bandwidth_cap_bps) m = Dataset::apply_bandwidth_cap(m, *spec_.bandwidth_cap_bps);
        samples.push_back(m);
      }
    }
    return FeatureStats::from_samples(samples);
  }

  ScenarioSpec spec_;
  Rng rng_;
  const Dataset* dataset_;
  std::optional<ThermalModel> thermal_;
  FeatureStats stats_;
  int config_ = 0;
};

}  // namespace slobench
