#pragma once

#include <span>
#include <vector>

#include "slobench/errors.hpp"
#include "slobench/featurize.hpp"
#include "slobench/rng.hpp"

namespace slobench {

struct Transition {
  Observation obs{};
  int action = 0;
  double reward = 0.0;
  Observation next_obs{};
};

// Uniform-replay store with FIFO eviction at capacity.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    require(capacity > 0, "replay capacity must be positive");
  }

  void push(const Transition& t) {
    if (data_.size() < capacity_) {
      data_.push_back(t);
    } else {
      data_[write_] = t;
    }
    write_ = (write_ + 1) % capacity_;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const {
    require(size() >= n, "replay buffer underfull");
    std::vector<std::size_t> out(n);
    for (auto& i : out) i = rng.uniform_index(data_.size());
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t write_ = 0;
  std::vector<Transition> data_;
};

struct RolloutStep {
  Observation obs{};
  int action = 0;
  double reward = 0.0;
  double value = 0.0;
  double log_prob = 0.0;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over a continuing stream: the final state
// bootstraps with its value estimate, no terminals.
inline GaeResult gae(std::span<const double> rewards, std::span<const double> values,
                     double bootstrap_value, double gamma, double lambda) {
  require(rewards.size() == values.size(), "rewards and values must have equal length");
  require(!rewards.empty(), "cannot run GAE on an empty rollout");
  const std::size_t n = rewards.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = (i + 1 < n) ? values[i + 1] : bootstrap_value;
    const double delta = rewards[i] + gamma * next_value - values[i];
    acc = delta + gamma * lambda * acc;
    out.advantages[i] = acc;
    out.returns[i] = acc + values[i];
  }
  return out;
}

// Mean 0 / standard deviation 1 (sample std, epsilon-guarded).
inline std::vector<double> normalize_advantages(std::span<const double> adv, double eps = 1e-8) {
  require(!adv.empty(), "cannot normalize an empty advantage vector");
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double denom = adv.size() > 1 ? static_cast<double>(adv.size() - 1) : 1.0;
  const double sd = std::sqrt(var / denom);
  std::vector<double> out(adv.size());
  for (std::size_t i = 0; i < adv.size(); ++i) out[i] = (adv[i] - mean) / (sd + eps);
  return out;
}

}  // namespace slobench
