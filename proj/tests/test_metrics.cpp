#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "slobench/metrics.hpp"
#include "slobench/rng.hpp"

using namespace slobench;

namespace {

FrameTrace single_stream_trace(const std::vector<double>& capture,
                               const std::vector<double>& bytes, double rw = 180, double rh = 180,
                               double sw = 180, double sh = 180) {
  FrameTrace t;
  t.capture_s = {capture};
  t.frame_bytes = {bytes};
  t.render_w = {std::vector<double>(capture.size(), rw)};
  t.render_h = {std::vector<double>(capture.size(), rh)};
  t.source_w = {std::vector<double>(capture.size(), sw)};
  t.source_h = {std::vector<double>(capture.size(), sh)};
  return t;
}

// Independent straightforward re-computation of the five averaged metrics,
// written as plain double loops.
struct OracleMetrics {
  double lat, tp, rs, cpu, mem;
  int ts;
};

OracleMetrics metrics_oracle(const FrameTrace& t, const std::vector<double>& cpu,
                             const std::vector<double>& mem, const std::vector<int>& ts,
                             double cpu_ref, double mem_ref) {
  const int N = t.streams();
  const int T = t.timesteps();
  OracleMetrics o{0, 0, 0, 0, 0, 0};
  for (int k = 1; k < T; ++k) {
    for (int i = 0; i < N; ++i) {
      const double gap = t.capture_s[i][k] - t.capture_s[i][k - 1];
      o.lat += gap / N;
      o.tp += t.frame_bytes[i][k] / gap / N;
      o.rs += std::sqrt(t.render_w[i][k] * t.render_h[i][k] /
                        (t.source_w[i][k] * t.source_h[i][k])) /
              N;
    }
    o.cpu += cpu[k] / cpu_ref;
    o.mem += mem[k] / mem_ref;
    if (ts[k] > o.ts) o.ts = ts[k];
  }
  o.lat /= T - 1;
  o.tp /= T - 1;
  o.rs /= T - 1;
  o.cpu /= T - 1;
  o.mem /= T - 1;
  return o;
}

}  // namespace

TEST_CASE("latency is the mean inter-arrival gap") {
  auto t = single_stream_trace({0.0, 1.0 / 30, 2.0 / 30}, {100, 100, 100});
  std::vector<double> aux(3, 0.0);
  std::vector<int> ts(3, 0);
  auto m = compute_metrics(t, aux, aux, ts);
  REQUIRE(m.latency_s == Catch::Approx(1.0 / 30).epsilon(1e-14));
  REQUIRE(m.stream_count == 1);
}

TEST_CASE("throughput averages per-frame byte rates") {
  std::vector<double> capture{0.1, 0.2, 0.3, 0.4};
  std::vector<double> bytes(4, 1000.0);
  auto t = single_stream_trace(capture, bytes);
  std::vector<double> aux(4, 0.0);
  std::vector<int> ts(4, 0);
  auto m = compute_metrics(t, aux, aux, ts);
  REQUIRE(m.throughput_bps == Catch::Approx(10'000.0).epsilon(1e-14));
}

TEST_CASE("render scale is the area-ratio square root") {
  auto t = single_stream_trace({0.0, 0.1, 0.2}, {10, 10, 10}, 360, 360, 180, 180);
  std::vector<double> aux(3, 0.0);
  std::vector<int> ts(3, 0);
  auto m = compute_metrics(t, aux, aux, ts);
  REQUIRE(m.render_scale == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("thermal state takes the max over timesteps after the first") {
  auto t = single_stream_trace({0.0, 0.1, 0.2, 0.3}, {10, 10, 10, 10});
  std::vector<double> aux(4, 0.0);
  auto m = compute_metrics(t, aux, aux, std::vector<int>{0, 1, 0, 2});
  REQUIRE(m.thermal == 2);
  // The first timestep is excluded from the window.
  auto m2 = compute_metrics(t, aux, aux, std::vector<int>{3, 0, 0, 0});
  REQUIRE(m2.thermal == 0);
}

TEST_CASE("traces with fewer than two timesteps are rejected") {
  auto t = single_stream_trace({0.0}, {10});
  std::vector<double> aux(1, 0.0);
  std::vector<int> ts(1, 0);
  REQUIRE_THROWS_AS(compute_metrics(t, aux, aux, ts), contract_error);
}

TEST_CASE("averaged metrics match the double-loop oracle on random traces") {
  Rng rng(20240811);
  for (int iter = 0; iter < 1000; ++iter) {
    const int n = 1 + static_cast<int>(rng.uniform_index(4));
    const int T = 2 + static_cast<int>(rng.uniform_index(7));
    FrameTrace t;
    t.capture_s.assign(n, std::vector<double>(T));
    t.frame_bytes.assign(n, std::vector<double>(T));
    t.render_w.assign(n, std::vector<double>(T));
    t.render_h.assign(n, std::vector<double>(T));
    t.source_w.assign(n, std::vector<double>(T));
    t.source_h.assign(n, std::vector<double>(T));
    for (int i = 0; i < n; ++i) {
      double clock = rng.uniform(0.0, 0.2);
      for (int k = 0; k < T; ++k) {
        clock += rng.uniform(1e-4, 0.3);
        t.capture_s[i][k] = clock;
        t.frame_bytes[i][k] = rng.uniform(1.0, 1e6);
        t.render_w[i][k] = rng.uniform(10.0, 800.0);
        t.render_h[i][k] = rng.uniform(10.0, 800.0);
        t.source_w[i][k] = rng.uniform(10.0, 800.0);
        t.source_h[i][k] = rng.uniform(10.0, 800.0);
      }
    }
    std::vector<double> cpu(T), mem(T);
    std::vector<int> ts(T);
    for (int k = 0; k < T; ++k) {
      cpu[k] = rng.uniform(0.0, 2.5);
      mem[k] = rng.uniform(0.0, 400.0);
      ts[k] = static_cast<int>(rng.uniform_index(4));
    }
    auto m = compute_metrics(t, cpu, mem, ts);
    auto o = metrics_oracle(t, cpu, mem, ts, 2.0, 200.0);
    REQUIRE(m.latency_s == Catch::Approx(o.lat).epsilon(1e-12));
    REQUIRE(m.throughput_bps == Catch::Approx(o.tp).epsilon(1e-12));
    REQUIRE(m.render_scale == Catch::Approx(o.rs).epsilon(1e-12));
    REQUIRE(m.cpu == Catch::Approx(o.cpu).epsilon(1e-12));
    REQUIRE(m.mem == Catch::Approx(o.mem).epsilon(1e-12));
    REQUIRE(m.thermal == o.ts);
  }
}
