#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "slobench/rl_buffers.hpp"

using namespace slobench;

namespace {

// O(T^2) direct evaluation of the discounted sum of TD errors.
std::vector<double> gae_brute_force(const std::vector<double>& rewards,
                                    const std::vector<double>& values, double bootstrap,
                                    double gamma, double lambda) {
  const std::size_t n = rewards.size();
  std::vector<double> delta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? values[t + 1] : bootstrap;
    delta[t] = rewards[t] + gamma * next - values[t];
  }
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (std::size_t l = t; l < n; ++l) {
      adv[t] += w * delta[l];
      w *= gamma * lambda;
    }
  }
  return adv;
}

}  // namespace

TEST_CASE("single-step advantage is the bootstrapped TD error") {
  auto g = gae(std::vector<double>{0.7}, std::vector<double>{0.2}, 0.5, 0.99, 0.95);
  REQUIRE(g.advantages[0] == Catch::Approx(0.7 + 0.99 * 0.5 - 0.2).epsilon(1e-15));
  REQUIRE(g.returns[0] == Catch::Approx(g.advantages[0] + 0.2).epsilon(1e-15));
}

TEST_CASE("lambda zero collapses to one-step TD errors") {
  std::vector<double> r{0.1, 0.2, 0.3, 0.4};
  std::vector<double> v{0.5, 0.4, 0.3, 0.2};
  auto g = gae(r, v, 0.1, 0.99, 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    const double next = t + 1 < r.size() ? v[t + 1] : 0.1;
    REQUIRE(g.advantages[t] == Catch::Approx(r[t] + 0.99 * next - v[t]).epsilon(1e-12));
  }
}

TEST_CASE("recursion matches the brute-force double sum for all short horizons") {
  Rng rng(314);
  for (int T = 1; T <= 16; ++T) {
    for (int rep = 0; rep < 80; ++rep) {
      std::vector<double> r(T), v(T);
      for (int t = 0; t < T; ++t) {
        r[t] = rng.uniform(-1.0, 1.0);
        v[t] = rng.uniform(-1.0, 1.0);
      }
      const double boot = rng.uniform(-1.0, 1.0);
      const double gamma = rng.uniform(0.0, 1.0);
      const double lambda = rng.uniform(0.0, 1.0);
      auto fast = gae(r, v, boot, gamma, lambda);
      auto slow = gae_brute_force(r, v, boot, gamma, lambda);
      for (int t = 0; t < T; ++t) {
        REQUIRE(fast.advantages[t] == Catch::Approx(slow[t]).margin(1e-12));
        REQUIRE(fast.returns[t] == Catch::Approx(slow[t] + v[t]).margin(1e-12));
      }
    }
  }
}

TEST_CASE("length mismatches are contract violations") {
  REQUIRE_THROWS_AS(gae(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}, 0.0, 0.9, 0.9),
                    contract_error);
}

TEST_CASE("advantage normalization yields mean zero and guards constants") {
  std::vector<double> adv{1.0, 2.0, 3.0, 4.0};
  auto n = normalize_advantages(adv);
  double mean = 0.0;
  for (double x : n) mean += x;
  REQUIRE(mean == Catch::Approx(0.0).margin(1e-12));
  // all-equal advantages normalize to all zeros
  auto z = normalize_advantages(std::vector<double>{0.5, 0.5, 0.5});
  for (double x : z) REQUIRE(x == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("replay buffer evicts FIFO at capacity and refuses underfull sampling") {
  ReplayBuffer buf(4);
  Rng rng(1);
  for (int i = 0; i < 6; ++i) {
    Transition t;
    t.reward = i;
    buf.push(t);
  }
  REQUIRE(buf.size() == 4);
  // oldest two (0,1) evicted
  double min_reward = 1e9;
  for (std::size_t i = 0; i < buf.size(); ++i) min_reward = std::min(min_reward, buf.at(i).reward);
  REQUIRE(min_reward == 2.0);
  REQUIRE_THROWS_AS(buf.sample_indices(5, rng), contract_error);
  auto idx = buf.sample_indices(4, rng);
  REQUIRE(idx.size() == 4);
}
