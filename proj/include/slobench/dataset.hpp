#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "slobench/actions.hpp"
#include "slobench/io_util.hpp"
#include "slobench/metrics.hpp"
#include "slobench/rng.hpp"
#include "slobench/scenario.hpp"
#include "slobench/synth.hpp"

namespace slobench {

inline constexpr int kNumContinuousMetrics = 5;
inline constexpr std::array<const char*, kNumContinuousMetrics> kContinuousMetricNames{
    "cpu", "mem", "throughput_bps", "latency_s", "render_scale"};

inline std::array<double, kNumContinuousMetrics> continuous_values(const MetricsSample& m) {
  return {m.cpu, m.mem, m.throughput_bps, m.latency_s, m.render_scale};
}

// Global mean and standard deviation per continuous metric, used to z-score
// agent observations.
struct FeatureStats {
  std::array<double, kNumContinuousMetrics> mean{};
  std::array<double, kNumContinuousMetrics> stddev{};

  static FeatureStats from_samples(const std::vector<MetricsSample>& samples) {
    require(!samples.empty(), "cannot compute stats from an empty sample set");
    FeatureStats s;
    for (const auto& m : samples) {
      auto v = continuous_values(m);
      for (int k = 0; k < kNumContinuousMetrics; ++k) s.mean[k] += v[k];
    }
    for (int k = 0; k < kNumContinuousMetrics; ++k) s.mean[k] /= samples.size();
    for (const auto& m : samples) {
      auto v = continuous_values(m);
      for (int k = 0; k < kNumContinuousMetrics; ++k) {
        const double d = v[k] - s.mean[k];
        s.stddev[k] += d * d;
      }
    }
    for (int k = 0; k < kNumContinuousMetrics; ++k)
      s.stddev[k] = std::sqrt(s.stddev[k] / samples.size());
    return s;
  }
};

inline fs::path stats_sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension();
  p += ".stats.csv";
  return p;
}

inline constexpr const char* kDatasetHeader =
    "streams,resolution,fps,cpu,mem,throughput_bps,latency_s,render_scale,thermal";

// Pre-collected metrics: a fixed number of records per configuration plus the
// featurization statistics sidecar. Rows are grouped by configuration in
// action order.
class Dataset {
 public:
  const std::vector<MetricsSample>& records_for(int action) const {
    if (action < 0 || action >= kNumActions)
      throw std::domain_error("action index out of range");
    return records_[action];
  }

  const FeatureStats& stats() const { return stats_; }

  std::size_t records_per_config() const { return records_[0].size(); }

  static Dataset generate(double noise_sigma, std::optional<double> bandwidth_cap_bps,
                          std::uint64_t seed, int records_per_config = 512,
                          const SynthParams& params = {}) {
    require(records_per_config >= 1, "records per config must be positive");
    Dataset d;
    std::vector<MetricsSample> all;
    all.reserve(static_cast<std::size_t>(kNumActions) * records_per_config);
    for (int a = 0; a < kNumActions; ++a) {
      Rng rng(derive_seed(seed, "dataset", static_cast<std::uint64_t>(a)));
      const StreamConfig cfg = action_config(a);
      d.records_[a].reserve(records_per_config);
      for (int r = 0; r < records_per_config; ++r) {
        MetricsSample m = synth_sample(cfg, noise_sigma, rng, params);
        if (bandwidth_cap_bps) m = apply_bandwidth_cap(m, *bandwidth_cap_bps);
        d.records_[a].push_back(m);
        all.push_back(m);
      }
    }
    d.stats_ = FeatureStats::from_samples(all);
    return d;
  }

  static MetricsSample apply_bandwidth_cap(MetricsSample m, double cap_bps) {
    if (m.throughput_bps > cap_bps) {
      const double queue = m.throughput_bps / cap_bps;
      m.throughput_bps = cap_bps;
      m.latency_s *= queue;
    }
    return m;
  }

  void save(const fs::path& csv_path) const {
    std::string out;
    out.reserve(records_[0].size() * kNumActions * 64);
    out += kDatasetHeader;
    out += '\n';
    for (int a = 0; a < kNumActions; ++a) {
      const StreamConfig cfg = action_config(a);
      for (const auto& m : records_[a]) {
        out += std::to_string(cfg.streams);
        out += ',';
        out += std::to_string(cfg.resolution);
        out += ',';
        out += std::to_string(cfg.fps);
        out += ',';
        out += fmt_double(m.cpu);
        out += ',';
        out += fmt_double(m.mem);
        out += ',';
        out += fmt_double(m.throughput_bps);
        out += ',';
        out += fmt_double(m.latency_s);
        out += ',';
        out += fmt_double(m.render_scale);
        out += ',';
        out += std::to_string(m.thermal);
        out += '\n';
      }
    }
    write_file(csv_path, out);

    std::string stats = "metric,mean,std\n";
    for (int k = 0; k < kNumContinuousMetrics; ++k) {
      stats += kContinuousMetricNames[k];
      stats += ',';
      stats += fmt_double(stats_.mean[k]);
      stats += ',';
      stats += fmt_double(stats_.stddev[k]);
      stats += '\n';
    }
    write_file(stats_sidecar_path(csv_path), stats);
  }

  static Dataset load(const fs::path& csv_path) {
    auto lines = read_lines(csv_path);
    if (lines.empty() || lines[0] != kDatasetHeader)
      throw io_error("bad dataset header in " + csv_path.string());

    Dataset d;
    std::array<bool, kNumActions> seen{};
    int current = -1;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
      if (lines[ln].empty()) continue;
      auto f = split(lines[ln], ',');
      if (f.size() != 9)
        throw io_error("bad dataset row at line " + std::to_string(ln + 1));
      StreamConfig cfg{static_cast<int>(parse_long(f[0])), static_cast<int>(parse_long(f[1])),
                       static_cast<int>(parse_long(f[2]))};
      if (!is_legal(cfg))
        throw io_error("illegal configuration at line " + std::to_string(ln + 1));
      const int a = action_index(cfg);
      if (a != current) {
        if (seen[a])
          throw io_error("configuration rows not contiguous at line " + std::to_string(ln + 1));
        seen[a] = true;
        current = a;
      }
      MetricsSample m;
      m.cpu = parse_double(f[3]);
      m.mem = parse_double(f[4]);
      m.throughput_bps = parse_double(f[5]);
      m.latency_s = parse_double(f[6]);
      m.render_scale = parse_double(f[7]);
      m.thermal = static_cast<int>(parse_long(f[8]));
      m.stream_count = cfg.streams;
      d.records_[a].push_back(m);
    }

    for (int a = 0; a < kNumActions; ++a) {
      if (!seen[a])
        throw io_error("dataset missing configuration " + config_to_string(action_config(a)));
      if (d.records_[a].size() < static_cast<std::size_t>(kBatchSize))
        throw io_error("configuration " + config_to_string(action_config(a)) +
                       " has fewer than 32 records");
    }

    auto stats_path = stats_sidecar_path(csv_path);
    auto stats_lines = read_lines(stats_path);
    if (stats_lines.empty() || stats_lines[0] != "metric,mean,std")
      throw io_error("bad stats sidecar header in " + stats_path.string());
    std::array<bool, kNumContinuousMetrics> have{};
    for (std::size_t ln = 1; ln < stats_lines.size(); ++ln) {
      if (stats_lines[ln].empty()) continue;
      auto f = split(stats_lines[ln], ',');
      if (f.size() != 3) throw io_error("bad stats row in " + stats_path.string());
      int k = -1;
      for (int i = 0; i < kNumContinuousMetrics; ++i)
        if (f[0] == kContinuousMetricNames[i]) k = i;
      if (k < 0) throw io_error("unknown metric in stats sidecar: " + f[0]);
      d.stats_.mean[k] = parse_double(f[1]);
      d.stats_.stddev[k] = parse_double(f[2]);
      have[k] = true;
    }
    for (int k = 0; k < kNumContinuousMetrics; ++k)
      if (!have[k])
        throw io_error(std::string("stats sidecar missing metric ") + kContinuousMetricNames[k]);
    return d;
  }

 private:
  std::array<std::vector<MetricsSample>, kNumActions> records_;
  FeatureStats stats_;
};

}  // namespace slobench
