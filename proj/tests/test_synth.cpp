#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "slobench/environment.hpp"
#include "slobench/metrics.hpp"
#include "slobench/rng.hpp"
#include "slobench/synth.hpp"

using namespace slobench;

TEST_CASE("tile layout carves the portrait canvas into square tiles") {
  REQUIRE(tile_layout(1).side == 390.0);
  REQUIRE(tile_layout(2).side == 195.0);
  REQUIRE(tile_layout(5).side == 130.0);
  REQUIRE(tile_layout(10).side == 97.5);
  REQUIRE(tile_layout(15).side == 97.5);
  REQUIRE(tile_layout(20).side == 78.0);
  REQUIRE(render_scale_for(1, 180) == Catch::Approx(390.0 / 180.0));
}

TEST_CASE("noise-free traces have exact nominal inter-arrival times") {
  Rng rng(42);
  for (int a : {0, 53, 107}) {
    const StreamConfig cfg = action_config(a);
    auto t = generate_frame_trace(cfg, 0.0, std::nullopt, rng);
    REQUIRE(t.streams() == cfg.streams);
    REQUIRE(t.timesteps() >= 2);
    for (int i = 0; i < t.streams(); ++i)
      for (int k = 1; k < t.timesteps(); ++k)
        REQUIRE(t.capture_s[i][k] - t.capture_s[i][k - 1] ==
                Catch::Approx(1.0 / cfg.fps).epsilon(1e-12));
  }
}

TEST_CASE("noise-free frame size follows the pixel budget") {
  Rng rng(42);
  auto t = generate_frame_trace({1, 180, 5}, 0.0, std::nullopt, rng);
  for (int k = 0; k < t.timesteps(); ++k)
    REQUIRE(t.frame_bytes[0][k] == Catch::Approx(324.0).epsilon(1e-12));
}

TEST_CASE("capped traces never exceed the cap when measured") {
  Rng rng(7);
  const double cap = 125'000.0;
  for (int iter = 0; iter < 20; ++iter) {
    auto t = generate_frame_trace({20, 720, 30}, 0.1, cap, rng);
    std::vector<double> aux(t.timesteps(), 0.0);
    std::vector<int> ts(t.timesteps(), 0);
    auto m = compute_metrics(t, aux, aux, ts);
    REQUIRE(m.throughput_bps <= cap * 1.01);
  }
}

TEST_CASE("noise-free throughput is monotone along each axis") {
  Rng rng(3);
  auto tp = [&](const StreamConfig& c) { return synth_sample(c, 0.0, rng).throughput_bps; };
  for (std::size_t i = 1; i < kStreamChoices.size(); ++i)
    REQUIRE(tp({kStreamChoices[i], 360, 15}) >= tp({kStreamChoices[i - 1], 360, 15}));
  for (std::size_t i = 1; i < kResolutionChoices.size(); ++i)
    REQUIRE(tp({5, kResolutionChoices[i], 15}) >= tp({5, kResolutionChoices[i - 1], 15}));
  for (std::size_t i = 1; i < kFpsChoices.size(); ++i)
    REQUIRE(tp({5, 360, kFpsChoices[i]}) >= tp({5, 360, kFpsChoices[i - 1]}));
}

TEST_CASE("synthetic samples describe the configuration") {
  Rng rng(5);
  auto m = synth_sample({10, 360, 20}, 0.1, rng);
  REQUIRE(m.stream_count == 10);
  REQUIRE(m.render_scale == Catch::Approx(97.5 / 360.0));
  REQUIRE(m.cpu >= 0.0);
  REQUIRE(m.mem >= 0.0);
  REQUIRE((m.thermal == 0 || m.thermal == 1));
}

TEST_CASE("identical seeds reproduce identical synthetic batches") {
  ScenarioSpec spec = scenario_preset("basic");
  Environment a(spec, 1234);
  Environment b(spec, 1234);
  auto sa = a.sample_batch(17, 1000);
  auto sb = b.sample_batch(17, 1000);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    REQUIRE(sa[i].throughput_bps == sb[i].throughput_bps);
    REQUIRE(sa[i].latency_s == sb[i].latency_s);
    REQUIRE(sa[i].cpu == sb[i].cpu);
    REQUIRE(sa[i].mem == sb[i].mem);
    REQUIRE(sa[i].thermal == sb[i].thermal);
  }
}

TEST_CASE("bandwidth cap transformation clamps throughput and inflates latency") {
  MetricsSample m;
  m.throughput_bps = 500'000.0;
  m.latency_s = 0.05;
  auto capped = Dataset::apply_bandwidth_cap(m, 125'000.0);
  REQUIRE(capped.throughput_bps == 125'000.0);
  REQUIRE(capped.latency_s == Catch::Approx(0.05 * 4.0));
  // below the cap: untouched
  auto free_sample = Dataset::apply_bandwidth_cap(m, 1e9);
  REQUIRE(free_sample.throughput_bps == 500'000.0);
  REQUIRE(free_sample.latency_s == 0.05);
}
