#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "slobench/a2c_agent.hpp"
#include "slobench/agent.hpp"
#include "slobench/featurize.hpp"
#include "slobench/nn.hpp"
#include "slobench/rl_buffers.hpp"

namespace slobench {

struct PpoOptions {
  std::vector<int> hidden{64, 64};
  double learning_rate = 1e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int n_steps = 1280;
  int batch_size = 128;
  int n_epochs = 10;
  double clip_range = 0.2;
  double vf_coef = 0.25;
  double ent_coef = 0.01;
  double policy_head_scale = 0.01;
};

// Proximal policy optimization: clipped surrogate over shuffled minibatches,
// several epochs per rollout, advantages normalized per minibatch.
class PpoAgent : public Agent {
 public:
  PpoAgent(const FeatureStats& stats, std::uint64_t seed, PpoOptions opt = {})
      : opt_(opt), stats_(stats), rng_(derive_seed(seed, "ppo")) {
    Rng init(derive_seed(seed, "ppo-init"));
    NetSpec spec;
    spec.input = kObservationSize;
    spec.hidden = opt_.hidden;
    spec.heads = {kNumActions, 1};
    spec.head_scale = {opt_.policy_head_scale, 1.0};
    net_ = Net(spec, init);
    adam_ = Adam(net_.param_count(), opt_.learning_rate);
    rollout_.reserve(opt_.n_steps);
  }

  std::string name() const override { return "ppo"; }
  int decision_interval() const override { return 1; }

  int decide_train(std::span<const StepRecord> records) override {
    require(records.size() == 1, "ppo processes one observation per decision");
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
    require(records.size() == 1, "ppo processes one observation per decision");
    const Observation obs =
        featurize(records.back().sample, records.back().action_index, stats_);
    Mat x(1, kObservationSize);
    for (int k = 0; k < kObservationSize; ++k) x(0, k) = obs[k];
    return argmax_lowest_tie(net_.forward(x).heads[0].row(0).transpose());
  }

  // Full PPO update over the rollout; returns the mean loss across minibatch
  // steps. Old log-probabilities, advantages, and returns stay fixed through
  // the epochs.
  LossParts update(const std::vector<RolloutStep>& rollout, double bootstrap_value, bool apply) {
    const int n = static_cast<int>(rollout.size());
    require(n >= 1, "empty rollout");
    std::vector<double> rewards(n), values(n);
    for (int i = 0; i < n; ++i) {
      rewards[i] = rollout[i].reward;
      values[i] = rollout[i].value;
    }
    const GaeResult g = gae(rewards, values, bootstrap_value, opt_.gamma, opt_.gae_lambda);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const int mb = std::min(opt_.batch_size, n);

    LossParts mean;
    int steps = 0;
    for (int epoch = 0; epoch < opt_.n_epochs; ++epoch) {
      // Fisher-Yates with the agent's own stream.
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<int>(rng_.uniform_index(i + 1))]);
      for (int start = 0; start + mb <= n; start += mb) {
        std::vector<int> idx(order.begin() + start, order.begin() + start + mb);
        const LossParts parts = minibatch_update(rollout, g, idx, apply);
        mean.total += parts.total;
        mean.policy += parts.policy;
        mean.value += parts.value;
        mean.entropy += parts.entropy;
        ++steps;
      }
    }
    mean.total /= steps;
    mean.policy /= steps;
    mean.value /= steps;
    mean.entropy /= steps;
    return mean;
  }

  // One clipped-surrogate step on the given rollout rows.
  LossParts minibatch_update(const std::vector<RolloutStep>& rollout, const GaeResult& g,
                             const std::vector<int>& idx, bool apply) {
    const int b = static_cast<int>(idx.size());
    std::vector<double> raw_adv(b);
    for (int i = 0; i < b; ++i) raw_adv[i] = g.advantages[idx[i]];
    const std::vector<double> adv = normalize_advantages(raw_adv);

    Mat x(b, kObservationSize);
    for (int i = 0; i < b; ++i)
      for (int k = 0; k < kObservationSize; ++k) x(i, k) = rollout[idx[i]].obs[k];
    const auto acts = net_.forward(x);

    net_.zero_grad();
    Mat dlogits = Mat::Zero(b, kNumActions);
    Mat dvalue = Mat::Zero(b, 1);
    LossParts parts;
    for (int i = 0; i < b; ++i) {
      const RolloutStep& step = rollout[idx[i]];
      const Vec probs = softmax(acts.heads[0].row(i).transpose());
      const Vec logp = probs.array().log();
      const double entropy = -(probs.array() * logp.array()).sum();
      const int a = step.action;
      const double ratio = std::exp(logp[a] - step.log_prob);
      const double clipped = std::clamp(ratio, 1.0 - opt_.clip_range, 1.0 + opt_.clip_range);
      const double u = ratio * adv[i];
      const double v = clipped * adv[i];
      const bool unclipped_active = u <= v;
      const double verr = acts.heads[1](i, 0) - g.returns[idx[i]];

      parts.policy -= std::min(u, v);
      parts.value += verr * verr;
      parts.entropy += entropy;

      for (int j = 0; j < kNumActions; ++j) {
        double dp = opt_.ent_coef * probs[j] * (logp[j] + entropy);
        if (unclipped_active)
          dp += adv[i] * ratio * (probs[j] - (j == a ? 1.0 : 0.0));
        dlogits(i, j) = dp / b;
      }
      dvalue(i, 0) = opt_.vf_coef * 2.0 * verr / b;
    }
    parts.policy /= b;
    parts.value /= b;
    parts.entropy /= b;
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
  const PpoOptions& options() const { return opt_; }

  void save(std::ostream& out) const override {
    put_str(out, "SLOPPO01");
    net_.save(out);
    adam_.save(out);
    put_u64(out, static_cast<std::uint64_t>(total_steps_));
  }

  void load(std::istream& in) override {
    if (get_str(in) != "SLOPPO01") throw io_error("not a ppo checkpoint");
    net_.load(in);
    adam_.load(in);
    total_steps_ = static_cast<long>(get_u64(in));
    rollout_.clear();
    has_pending_ = false;
  }

  std::uint64_t param_hash() const override { return net_.param_hash(); }

 private:
  PpoOptions opt_;
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
