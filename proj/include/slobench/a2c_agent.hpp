#pragma once

#include <cmath>
#include <vector>

#include "slobench/agent.hpp"
#include "slobench/featurize.hpp"
#include "slobench/nn.hpp"
#include "slobench/rl_buffers.hpp"

namespace slobench {

struct LossParts {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

inline int sample_categorical(const Vec& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return static_cast<int>(probs.size()) - 1;
}

struct A2cOptions {
  std::vector<int> hidden{128, 128};
  double learning_rate = 1e-4;
  double gamma = 0.99;
  double gae_lambda = 0.9;
  int n_steps = 64;
  double vf_coef = 0.75;
  double ent_coef = 0.01;
  bool normalize_advantage = true;
  double policy_head_scale = 0.01;
};

// Advantage actor-critic on a shared trunk with policy and value heads. One
// gradient step per collected rollout.
class A2cAgent : public Agent {
 public:
  A2cAgent(const FeatureStats& stats, std::uint64_t seed, A2cOptions opt = {})
      : opt_(opt), stats_(stats), rng_(derive_seed(seed, "a2c")) {
    Rng init(derive_seed(seed, "a2c-init"));
    NetSpec spec;
    spec.input = kObservationSize;
    spec.hidden = opt_.hidden;
    spec.heads = {kNumActions, 1};
    spec.head_scale = {opt_.policy_head_scale, 1.0};
    net_ = Net(spec, init);
    adam_ = Adam(net_.param_count(), opt_.learning_rate);
    rollout_.reserve(opt_.n_steps);
  }

  std::string name() const override { return "a2c"; }
  int decision_interval() const override { return 1; }

  int decide_train(std::span<const StepRecord> records) override {
    require(records.size() == 1, "a2c processes one observation per decision");
    const StepRecord& rec = records.front();
    const Observation obs = featurize(rec.sample, rec.action_index, stats_);
    ++total_steps_;

    if (has_pending_) {
      rollout_.push_back(
          {pending_obs_, pending_action_, rec.reward, pending_value_, pending_log_prob_});
      if (static_cast<int>(rollout_.size()) == opt_.n_steps) {
        update(rollout_, value_of(obs), true);
        rollout_.clear();
      }
    }

    Mat x(1, kObservationSize);
    for (int k = 0; k < kObservationSize; ++k) x(0, k) = obs[k];
    const auto acts = net_.forward(x);
    const Vec probs = softmax(acts.heads[0].row(0).transpose());
    const int action = sample_categorical(probs, rng_);
    pending_obs_ = obs;
    pending_action_ = action;
    pending_value_ = acts.heads[1](0, 0);
    pending_log_prob_ = std::log(probs[action]);
    has_pending_ = true;
    return action;
  }

  int decide_eval(std::span<const StepRecord> records) const override {
    require(records.size() == 1, "a2c processes one observation per decision");
    const Observation obs =
        featurize(records.back().sample, records.back().action_index, stats_);
    Mat x(1, kObservationSize);
    for (int k = 0; k < kObservationSize; ++k) x(0, k) = obs[k];
    return argmax_lowest_tie(net_.forward(x).heads[0].row(0).transpose());
  }

  // Policy-gradient step with normalized advantages, value regression, and an
  // entropy bonus. Exposed for verification; gradients stay accumulated when
  // apply is false. Advantages derive from the rollout's stored values.
  LossParts update(const std::vector<RolloutStep>& rollout, double bootstrap_value, bool apply) {
    const int n = static_cast<int>(rollout.size());
    require(n >= 1, "empty rollout");
    std::vector<double> rewards(n), values(n);
    for (int i = 0; i < n; ++i) {
      rewards[i] = rollout[i].reward;
      values[i] = rollout[i].value;
    }
    const GaeResult g = gae(rewards, values, bootstrap_value, opt_.gamma, opt_.gae_lambda);
    std::vector<double> adv =
        opt_.normalize_advantage ? normalize_advantages(g.advantages) : g.advantages;

    Mat x(n, kObservationSize);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < kObservationSize; ++k) x(i, k) = rollout[i].obs[k];
    const auto acts = net_.forward(x);

    net_.zero_grad();
    Mat dlogits = Mat::Zero(n, kNumActions);
    Mat dvalue = Mat::Zero(n, 1);
    LossParts parts;
    for (int i = 0; i < n; ++i) {
      const Vec probs = softmax(acts.heads[0].row(i).transpose());
      const Vec logp = probs.array().log();
      const double entropy = -(probs.array() * logp.array()).sum();
      const int a = rollout[i].action;
      const double verr = acts.heads[1](i, 0) - g.returns[i];

      parts.policy -= logp[a] * adv[i];
      parts.value += verr * verr;
      parts.entropy += entropy;

      for (int j = 0; j < kNumActions; ++j) {
        dlogits(i, j) = (adv[i] * (probs[j] - (j == a ? 1.0 : 0.0)) +
                         opt_.ent_coef * probs[j] * (logp[j] + entropy)) /
                        n;
      }
      dvalue(i, 0) = opt_.vf_coef * 2.0 * verr / n;
    }
    parts.policy /= n;
    parts.value /= n;
    parts.entropy /= n;
    parts.total = parts.policy + opt_.vf_coef * parts.value - opt_.ent_coef * parts.entropy;

    net_.backward(x, acts, {dlogits, dvalue});
    if (apply) adam_.step(net_);
    return parts;
  }

  double value_of(const Observation& obs) const {
    Mat x(1, kObservationSize);
    for (int k = 0; k < kObservationSize; ++k) x(0, k) = obs[k];
    return net_.forward(x).heads[1](0, 0);
  }

  Net& net() { return net_; }

  void save(std::ostream& out) const override {
    put_str(out, "SLOA2C01");
    net_.save(out);
    adam_.save(out);
    put_u64(out, static_cast<std::uint64_t>(total_steps_));
  }

  void load(std::istream& in) override {
    if (get_str(in) != "SLOA2C01") throw io_error("not an a2c checkpoint");
    net_.load(in);
    adam_.load(in);
    total_steps_ = static_cast<long>(get_u64(in));
    rollout_.clear();
    has_pending_ = false;
  }

  std::uint64_t param_hash() const override { return net_.param_hash(); }

 private:
  A2cOptions opt_;
  FeatureStats stats_;
  Rng rng_;
  Net net_;
  Adam adam_;
  std::vector<RolloutStep> rollout_;
  Observation pending_obs_{};
  int pending_action_ = 0;
  double pending_value_ = 0.0;
  double pending_log_prob_ = 0.0;
  bool has_pending_ = false;
  long total_steps_ = 0;
};

}  // namespace slobench
