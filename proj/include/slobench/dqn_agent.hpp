#pragma once

#include <algorithm>
#include <vector>

#include "slobench/agent.hpp"
#include "slobench/featurize.hpp"
#include "slobench/nn.hpp"
#include "slobench/rl_buffers.hpp"

namespace slobench {

struct DqnOptions {
  std::vector<int> hidden{128, 128};
  double learning_rate = 1e-4;
  double gamma = 0.99;
  int batch_size = 128;
  int train_freq = 4;
  int grad_steps = 4;
  long target_update_interval = 10'000;
  double eps_initial = 1.0;
  double eps_final = 0.05;
  double exploration_fraction = 0.1;
  std::size_t replay_capacity = 100'000;
};

// Deep Q-network over the 108-way action space. Continuing task: targets
// always bootstrap through the target network; the exploration rate anneals
// linearly over the first fraction of the current run's budget.
class DqnAgent : public Agent {
 public:
  DqnAgent(const FeatureStats& stats, std::uint64_t seed, long budget, DqnOptions opt = {})
      : opt_(opt),
        stats_(stats),
        budget_(budget),
        rng_(derive_seed(seed, "dqn")),
        replay_(opt.replay_capacity) {
    Rng init(derive_seed(seed, "dqn-init"));
    NetSpec spec;
    spec.input = kObservationSize;
    spec.hidden = opt_.hidden;
    spec.heads = {kNumActions};
    net_ = Net(spec, init);
    target_ = net_;
    adam_ = Adam(net_.param_count(), opt_.learning_rate);
  }

  std::string name() const override { return "dqn"; }
  int decision_interval() const override { return 1; }

  int decide_train(std::span<const StepRecord> records) override {
    require(records.size() == 1, "dqn processes one observation per decision");
    const StepRecord& rec = records.front();
    const Observation obs = featurize(rec.sample, rec.action_index, stats_);

    if (has_pending_) replay_.push({pending_obs_, pending_action_, rec.reward, obs});
    ++run_steps_;
    ++total_steps_;

    if (run_steps_ % opt_.train_freq == 0 &&
        replay_.size() >= static_cast<std::size_t>(opt_.batch_size)) {
      for (int g = 0; g < opt_.grad_steps; ++g) {
        auto idx = replay_.sample_indices(opt_.batch_size, rng_);
        std::vector<Transition> batch;
        batch.reserve(idx.size());
        for (auto i : idx) batch.push_back(replay_.at(i));
        td_update(batch, true);
      }
    }
    if (run_steps_ % opt_.target_update_interval == 0) target_.copy_params_from(net_);

    int action;
    if (rng_.uniform() < exploration_rate()) {
      action = static_cast<int>(rng_.uniform_index(kNumActions));
    } else {
      action = greedy_action(obs);
    }
    pending_obs_ = obs;
    pending_action_ = action;
    has_pending_ = true;
    return action;
  }

  int decide_eval(std::span<const StepRecord> records) const override {
    require(records.size() == 1, "dqn processes one observation per decision");
    const StepRecord& rec = records.back();
    return greedy_action(featurize(rec.sample, rec.action_index, stats_));
  }

  // One TD step on an explicit minibatch: Huber loss against
  // r + gamma * max_a' Q_target(s', a'). Exposed for verification; gradients
  // are left accumulated in the online network when apply is false.
  double td_update(std::span<const Transition> batch, bool apply) {
    const int n = static_cast<int>(batch.size());
    require(n >= 1, "empty minibatch");
    Mat x(n, kObservationSize), xn(n, kObservationSize);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < kObservationSize; ++k) {
        x(i, k) = batch[i].obs[k];
        xn(i, k) = batch[i].next_obs[k];
      }
    }
    const auto acts = net_.forward(x);
    const auto target_acts = target_.forward(xn);

    net_.zero_grad();
    Mat dq = Mat::Zero(n, kNumActions);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double target =
          batch[i].reward + opt_.gamma * target_acts.heads[0].row(i).maxCoeff();
      const double err = acts.heads[0](i, batch[i].action) - target;
      loss += std::abs(err) <= 1.0 ? 0.5 * err * err : std::abs(err) - 0.5;
      dq(i, batch[i].action) = std::clamp(err, -1.0, 1.0) / n;
    }
    loss /= n;
    net_.backward(x, acts, {dq});
    if (apply) adam_.step(net_);
    return loss;
  }

  double exploration_rate() const {
    const double horizon = opt_.exploration_fraction * static_cast<double>(budget_);
    if (horizon <= 0.0) return opt_.eps_final;
    const double frac = std::min(1.0, static_cast<double>(run_steps_) / horizon);
    return opt_.eps_initial + frac * (opt_.eps_final - opt_.eps_initial);
  }

  std::size_t replay_size() const { return replay_.size(); }
  long run_steps() const { return run_steps_; }
  Net& online_net() { return net_; }
  const Net& target_net() const { return target_; }
  Adam& optimizer() { return adam_; }

  void save(std::ostream& out) const override {
    put_str(out, "SLODQN01");
    net_.save(out);
    adam_.save(out);
    put_u64(out, static_cast<std::uint64_t>(total_steps_));
  }

  void load(std::istream& in) override {
    if (get_str(in) != "SLODQN01") throw io_error("not a dqn checkpoint");
    net_.load(in);
    adam_.load(in);
    total_steps_ = static_cast<long>(get_u64(in));
    target_.copy_params_from(net_);
    run_steps_ = 0;
    has_pending_ = false;
  }

  std::uint64_t param_hash() const override { return net_.param_hash(); }

 private:
  int greedy_action(const Observation& obs) const {
    Mat x(1, kObservationSize);
    for (int k = 0; k < kObservationSize; ++k) x(0, k) = obs[k];
    const auto acts = net_.forward(x);
    return argmax_lowest_tie(acts.heads[0].row(0).transpose());
  }

  DqnOptions opt_;
  FeatureStats stats_;
  long budget_;
  Rng rng_;
  ReplayBuffer replay_;
  Net net_, target_;
  Adam adam_;
  Observation pending_obs_{};
  int pending_action_ = 0;
  bool has_pending_ = false;
  long run_steps_ = 0;
  long total_steps_ = 0;
};

}  // namespace slobench
