#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "slobench/agents.hpp"

using namespace slobench;

namespace {

FeatureStats unit_stats() {
  FeatureStats s;
  s.mean.fill(0.0);
  s.stddev.fill(1.0);
  return s;
}

MetricsSample mean_sample(const FeatureStats& s) {
  MetricsSample m;
  m.cpu = s.mean[0];
  m.mem = s.mean[1];
  m.throughput_bps = s.mean[2];
  m.latency_s = s.mean[3];
  m.render_scale = s.mean[4];
  m.thermal = 0;
  m.stream_count = 1;
  return m;
}

StepRecord record_for(int action, double reward_value) {
  StepRecord r;
  r.action_index = action;
  r.sample = MetricsSample{};
  r.sample.stream_count = action_config(action).streams;
  r.reward = reward_value;
  r.breakdown.s_overall = reward_value;
  return r;
}

Observation random_obs(Rng& rng) {
  Observation o{};
  for (int k = 0; k < 5; ++k) o[k] = rng.uniform(-1.0, 1.0);
  o[5 + rng.uniform_index(4)] = 1.0;
  o[9 + rng.uniform_index(6)] = 1.0;
  o[15 + rng.uniform_index(3)] = 1.0;
  o[18 + rng.uniform_index(6)] = 1.0;
  return o;
}

template <class Loss, class Agent>
double max_grad_rel_error(Agent& agent, Loss&& loss_and_grads) {
  // loss_and_grads(true) accumulates analytic grads, loss_and_grads(false)
  // returns the loss only.
  agent.net_for_test().zero_grad();
  loss_and_grads(true);
  std::vector<double> analytic;
  agent.net_for_test().visit_params([&](double&, double& g) { analytic.push_back(g); });

  const double eps = 1e-4;
  std::size_t i = 0;
  double max_rel = 0.0;
  agent.net_for_test().visit_params([&](double& p, double&) {
    const double orig = p;
    p = orig + eps;
    const double hi = loss_and_grads(false);
    p = orig - eps;
    const double lo = loss_and_grads(false);
    p = orig;
    const double numeric = (hi - lo) / (2 * eps);
    const double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-6});
    max_rel = std::max(max_rel, std::fabs(numeric - analytic[i]) / denom);
    ++i;
  });
  return max_rel;
}

struct DqnHarness {
  DqnAgent agent;
  DqnHarness(DqnOptions opt, std::uint64_t seed = 11)
      : agent(unit_stats(), seed, 64'000, opt) {}
  Net& net_for_test() { return agent.online_net(); }
};

struct A2cHarness {
  A2cAgent agent;
  A2cHarness(A2cOptions opt, std::uint64_t seed = 12) : agent(unit_stats(), seed, opt) {}
  Net& net_for_test() { return agent.net(); }
};

struct PpoHarness {
  PpoAgent agent;
  PpoHarness(PpoOptions opt, std::uint64_t seed = 13) : agent(unit_stats(), seed, opt) {}
  Net& net_for_test() { return agent.net(); }
};

}  // namespace

TEST_CASE("featurize produces 24 features with valid one-hot blocks") {
  FeatureStats stats = unit_stats();
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    MetricsSample m;
    m.cpu = rng.uniform(0.0, 1.0);
    m.mem = rng.uniform(0.0, 1.0);
    m.throughput_bps = rng.uniform(0.0, 3e6);
    m.latency_s = rng.uniform(0.0, 0.2);
    m.render_scale = rng.uniform(0.1, 2.0);
    m.thermal = static_cast<int>(rng.uniform_index(4));
    const int action = static_cast<int>(rng.uniform_index(108));
    auto obs = featurize(m, action, stats);
    REQUIRE(obs.size() == 24);
    auto block_sum = [&](int lo, int hi) {
      double s = 0.0;
      for (int k = lo; k < hi; ++k) s += obs[k];
      return s;
    };
    REQUIRE(block_sum(5, 9) == 1.0);
    REQUIRE(block_sum(9, 15) == 1.0);
    REQUIRE(block_sum(15, 18) == 1.0);
    REQUIRE(block_sum(18, 24) == 1.0);
  }
}

TEST_CASE("featurize z-scores against the dataset statistics") {
  FeatureStats stats;
  stats.mean = {0.5, 0.4, 1e5, 0.05, 1.1};
  stats.stddev = {0.1, 0.2, 1e4, 0.01, 0.0};  // zero-variance render scale
  auto obs = featurize(mean_sample(stats), 0, stats);
  for (int k = 0; k < 5; ++k) REQUIRE(obs[k] == 0.0);
  // first config selects index 0 in every configuration block
  REQUIRE(obs[9] == 1.0);
  REQUIRE(obs[15] == 1.0);
  REQUIRE(obs[18] == 1.0);
  REQUIRE_THROWS_AS(featurize(mean_sample(stats), 400, stats), std::domain_error);
}

TEST_CASE("dqn with zero discount regresses toward the reward") {
  DqnOptions opt;
  opt.hidden = {8};
  opt.gamma = 0.0;
  DqnHarness h(opt);
  h.agent.online_net().visit_params([](double& p, double&) { p = 0.0; });
  Rng rng(3);
  Transition t;
  t.obs = random_obs(rng);
  t.next_obs = random_obs(rng);
  t.action = 7;
  t.reward = 0.5;
  // zero net: Q = 0, target = r; err = -0.5 -> Huber loss = 0.125
  const double loss = h.agent.td_update(std::vector<Transition>{t}, false);
  REQUIRE(loss == Catch::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("dqn single-transition loss matches hand computation with fixed nets") {
  DqnOptions opt;
  opt.hidden = {8};
  opt.gamma = 0.99;
  DqnHarness h(opt);
  Rng rng(4);
  Transition t;
  t.obs = random_obs(rng);
  t.next_obs = random_obs(rng);
  t.action = 3;
  t.reward = 0.8;

  // Evaluate the nets directly to build the expected Huber value.
  Mat x(1, 24), xn(1, 24);
  for (int k = 0; k < 24; ++k) {
    x(0, k) = t.obs[k];
    xn(0, k) = t.next_obs[k];
  }
  const double q = h.agent.online_net().forward(x).heads[0](0, 3);
  const double target_max = h.agent.target_net().forward(xn).heads[0].row(0).maxCoeff();
  const double err = q - (t.reward + 0.99 * target_max);
  const double expected = std::abs(err) <= 1.0 ? 0.5 * err * err : std::abs(err) - 0.5;
  REQUIRE(h.agent.td_update(std::vector<Transition>{t}, false) ==
          Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dqn gradients pass the finite-difference check") {
  DqnOptions opt;
  opt.hidden = {8};
  DqnHarness h(opt);
  Rng rng(9);
  std::vector<Transition> batch(6);
  for (auto& t : batch) {
    t.obs = random_obs(rng);
    t.next_obs = random_obs(rng);
    t.action = static_cast<int>(rng.uniform_index(108));
    t.reward = rng.uniform(0.0, 1.0);
  }
  const double max_rel = max_grad_rel_error(h, [&](bool grads) {
    if (grads) return h.agent.td_update(batch, false);
    return h.agent.td_update(batch, false);
  });
  REQUIRE(max_rel < 1e-4);
}

TEST_CASE("dqn target network hard-syncs bitwise on the interval") {
  DqnOptions opt;
  opt.hidden = {8};
  opt.target_update_interval = 50;
  opt.batch_size = 8;
  opt.train_freq = 4;
  opt.grad_steps = 1;
  opt.replay_capacity = 256;
  DqnHarness h(opt);
  std::vector<StepRecord> recs{record_for(0, 0.5)};
  for (int step = 1; step <= 49; ++step) h.agent.decide_train(recs);
  REQUIRE(h.agent.online_net().param_hash() != h.agent.target_net().param_hash());
  h.agent.decide_train(recs);  // step 50
  REQUIRE(h.agent.online_net().param_hash() == h.agent.target_net().param_hash());
}

TEST_CASE("dqn at full exploration is uniform over the action space") {
  DqnOptions opt;
  opt.hidden = {8};
  opt.exploration_fraction = 1.0;
  opt.eps_final = 1.0;  // pin epsilon at 1
  opt.train_freq = 1'000'000;
  DqnHarness h(opt);
  std::vector<StepRecord> recs{record_for(0, 0.5)};
  std::array<long, 108> counts{};
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) counts[h.agent.decide_train(recs)]++;
  const double expected = static_cast<double>(draws) / 108.0;
  double chi2 = 0.0;
  for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // df=107 critical value at p=0.01 (Wilson-Hilferty approximation)
  REQUIRE(chi2 < 144.0);
}

TEST_CASE("a2c on a zero net has uniform entropy and zero policy term") {
  A2cOptions opt;
  opt.hidden = {8};
  A2cHarness h(opt);
  h.agent.net().visit_params([](double& p, double&) { p = 0.0; });
  Rng rng(6);
  std::vector<RolloutStep> rollout(4);
  for (auto& s : rollout) {
    s.obs = random_obs(rng);
    s.action = static_cast<int>(rng.uniform_index(108));
    s.reward = 0.7;  // constant rewards, zero values: equal advantages per step? no - discounting
    s.value = 0.0;
    s.log_prob = -std::log(108.0);
  }
  auto parts = h.agent.update(rollout, 0.0, false);
  REQUIRE(parts.entropy == Catch::Approx(std::log(108.0)).epsilon(1e-12));
  // A single-step rollout has one advantage, which normalizes to zero: the
  // update is then driven by the value and entropy terms alone.
  std::vector<RolloutStep> single{rollout[0]};
  auto sp = h.agent.update(single, 0.0, false);
  REQUIRE(sp.policy == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(sp.total == Catch::Approx(opt.vf_coef * sp.value - opt.ent_coef * sp.entropy)
                          .epsilon(1e-12));
}

TEST_CASE("a2c loss matches an independent recomputation") {
  A2cOptions opt;
  opt.hidden = {8};
  A2cHarness h(opt);
  Rng rng(7);
  std::vector<RolloutStep> rollout(2);
  for (auto& s : rollout) {
    s.obs = random_obs(rng);
    s.action = static_cast<int>(rng.uniform_index(108));
    s.reward = rng.uniform(0.0, 1.0);
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = s.obs[k];
    auto acts = h.agent.net().forward(x);
    s.value = acts.heads[1](0, 0);
    s.log_prob = std::log(softmax(acts.heads[0].row(0).transpose())[s.action]);
  }
  const double bootstrap = 0.3;
  auto parts = h.agent.update(rollout, bootstrap, false);

  // Independent recomputation from first principles.
  auto g = gae(std::vector<double>{rollout[0].reward, rollout[1].reward},
               std::vector<double>{rollout[0].value, rollout[1].value}, bootstrap, opt.gamma,
               opt.gae_lambda);
  auto adv = normalize_advantages(g.advantages);
  double policy = 0.0, value = 0.0, entropy = 0.0;
  for (int i = 0; i < 2; ++i) {
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = rollout[i].obs[k];
    auto acts = h.agent.net().forward(x);
    Vec probs = softmax(acts.heads[0].row(0).transpose());
    policy -= std::log(probs[rollout[i].action]) * adv[i];
    const double verr = acts.heads[1](0, 0) - g.returns[i];
    value += verr * verr;
    entropy += -(probs.array() * probs.array().log()).sum();
  }
  policy /= 2;
  value /= 2;
  entropy /= 2;
  const double total = policy + opt.vf_coef * value - opt.ent_coef * entropy;
  REQUIRE(parts.total == Catch::Approx(total).margin(1e-10));
}

TEST_CASE("a2c gradients pass the finite-difference check") {
  A2cOptions opt;
  opt.hidden = {8};
  A2cHarness h(opt);
  Rng rng(8);
  std::vector<RolloutStep> rollout(5);
  for (auto& s : rollout) {
    s.obs = random_obs(rng);
    s.action = static_cast<int>(rng.uniform_index(108));
    s.reward = rng.uniform(0.0, 1.0);
    s.value = rng.uniform(-0.2, 0.8);  // stored values stay fixed through the check
    s.log_prob = -std::log(108.0);
  }
  const double max_rel = max_grad_rel_error(
      h, [&](bool) { return h.agent.update(rollout, 0.4, false).total; });
  REQUIRE(max_rel < 1e-4);
}

TEST_CASE("ppo with unchanged policy has identity ratios") {
  PpoOptions opt;
  opt.hidden = {8};
  PpoHarness h(opt);
  Rng rng(10);
  std::vector<RolloutStep> rollout(4);
  for (auto& s : rollout) {
    s.obs = random_obs(rng);
    s.action = static_cast<int>(rng.uniform_index(108));
    s.reward = rng.uniform(0.0, 1.0);
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = s.obs[k];
    auto acts = h.agent.net().forward(x);
    s.value = acts.heads[1](0, 0);
    s.log_prob = std::log(softmax(acts.heads[0].row(0).transpose())[s.action]);
  }
  auto g = gae(std::vector<double>{rollout[0].reward, rollout[1].reward, rollout[2].reward,
                                   rollout[3].reward},
               std::vector<double>{rollout[0].value, rollout[1].value, rollout[2].value,
                                   rollout[3].value},
               0.0, opt.gamma, opt.gae_lambda);
  auto parts = h.agent.minibatch_update(rollout, g, {0, 1, 2, 3}, false);
  // ratio == 1 everywhere: surrogate reduces to -mean(normalized advantage) = 0
  REQUIRE(parts.policy == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("ppo clipped branch zeroes the policy gradient in the clip region") {
  PpoOptions opt;
  opt.hidden = {8};
  PpoHarness h(opt);
  Rng rng(11);
  std::vector<RolloutStep> rollout(2);
  for (auto& s : rollout) {
    s.obs = random_obs(rng);
    s.action = 5;
    s.reward = 0.0;
    s.value = 0.0;
  }
  // Raw advantages: +2 and 0 -> normalized +/-1/sqrt(2)-ish; sample 0 positive.
  GaeResult g;
  g.advantages = {2.0, 0.0};
  g.returns = {0.5, 0.5};
  auto logp_now = [&](int i) {
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = rollout[i].obs[k];
    return std::log(softmax(h.agent.net().forward(x).heads[0].row(0).transpose())[5]);
  };
  rollout[1].log_prob = logp_now(1);  // ratio 1 on the negative sample

  rollout[0].log_prob = logp_now(0) - std::log(1.5);  // ratio 1.5: clipped
  auto deep = h.agent.minibatch_update(rollout, g, {0, 1}, false);
  rollout[0].log_prob = logp_now(0) - std::log(1.3);  // ratio 1.3: still clipped
  auto shallow = h.agent.minibatch_update(rollout, g, {0, 1}, false);
  // Inside the clip region the surrogate is flat in the ratio.
  REQUIRE(deep.policy == Catch::Approx(shallow.policy).epsilon(1e-12));
  const double norm_adv = 1.0 / (std::sqrt(2.0) + 1e-8);  // sample std of {2,0} is sqrt(2)
  const double clipped_term = -(1.0 + opt.clip_range) * norm_adv;
  const double identity_term = -1.0 * -norm_adv;
  REQUIRE(deep.policy ==
          Catch::Approx((clipped_term + identity_term) / 2.0).epsilon(1e-9));
}

TEST_CASE("ppo gradients pass the finite-difference check across clip branches") {
  PpoOptions opt;
  opt.hidden = {8};
  PpoHarness h(opt);
  Rng rng(12);
  const int n = 6;
  std::vector<RolloutStep> rollout(n);
  GaeResult g;
  for (int i = 0; i < n; ++i) {
    auto& s = rollout[i];
    s.obs = random_obs(rng);
    s.action = static_cast<int>(rng.uniform_index(108));
    s.reward = rng.uniform(0.0, 1.0);
    s.value = rng.uniform(-0.5, 0.5);
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = s.obs[k];
    const double lp =
        std::log(softmax(h.agent.net().forward(x).heads[0].row(0).transpose())[s.action]);
    // spread old log-probs so some samples clip and some do not
    s.log_prob = lp - rng.uniform(-0.5, 0.5);
    g.advantages.push_back(rng.uniform(-1.0, 1.0));
    g.returns.push_back(rng.uniform(0.0, 1.0));
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  const double max_rel = max_grad_rel_error(
      h, [&](bool) { return h.agent.minibatch_update(rollout, g, idx, false).total; });
  REQUIRE(max_rel < 1e-4);
}

TEST_CASE("ppo full update decreases the rollout loss and keeps KL finite") {
  PpoOptions opt;
  opt.hidden = {8};
  opt.n_steps = 64;
  opt.batch_size = 16;
  opt.n_epochs = 4;
  PpoHarness h(opt);
  Rng rng(13);
  std::vector<RolloutStep> rollout(64);
  for (auto& s : rollout) {
    s.obs = random_obs(rng);
    s.action = static_cast<int>(rng.uniform_index(108));
    s.reward = rng.uniform(0.0, 1.0);
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = s.obs[k];
    auto acts = h.agent.net().forward(x);
    s.value = acts.heads[1](0, 0);
    s.log_prob = std::log(softmax(acts.heads[0].row(0).transpose())[s.action]);
  }
  auto full_loss = [&] {
    auto g = [&] {
      std::vector<double> r, v;
      for (auto& s : rollout) {
        r.push_back(s.reward);
        v.push_back(s.value);
      }
      return gae(r, v, 0.2, opt.gamma, opt.gae_lambda);
    }();
    std::vector<int> idx(rollout.size());
    for (std::size_t i = 0; i < rollout.size(); ++i) idx[i] = static_cast<int>(i);
    return h.agent.minibatch_update(rollout, g, idx, false).total;
  };
  const double before = full_loss();
  h.agent.update(rollout, 0.2, true);
  const double after = full_loss();
  REQUIRE(after < before);
  // approximate KL between the sampling policy and the updated one
  double kl = 0.0;
  for (auto& s : rollout) {
    Mat x(1, 24);
    for (int k = 0; k < 24; ++k) x(0, k) = s.obs[k];
    const double lp =
        std::log(softmax(h.agent.net().forward(x).heads[0].row(0).transpose())[s.action]);
    kl += s.log_prob - lp;
  }
  kl /= static_cast<double>(rollout.size());
  REQUIRE(std::isfinite(kl));
}

TEST_CASE("deterministic action selection is repeatable and tie-breaks low") {
  FeatureStats stats = unit_stats();
  A2cAgent a2c(stats, 21);
  std::vector<StepRecord> recs{record_for(5, 0.5)};
  const int first = a2c.decide_eval(recs);
  REQUIRE(a2c.decide_eval(recs) == first);
  // zero-weight policy: uniform logits, lowest index wins
  a2c.net().visit_params([](double& p, double&) { p = 0.0; });
  REQUIRE(a2c.decide_eval(recs) == 0);

  DqnAgent dqn(stats, 22, 1000);
  const int d1 = dqn.decide_eval(recs);
  REQUIRE(dqn.decide_eval(recs) == d1);
}

TEST_CASE("rl checkpoints resume training deterministically") {
  FeatureStats stats = unit_stats();
  PpoOptions opt;
  opt.hidden = {8};
  opt.n_steps = 16;
  opt.batch_size = 8;
  opt.n_epochs = 2;
  PpoAgent a(stats, 31, opt);
  Rng drive(99);
  auto run_steps = [&](PpoAgent& agent, int n, Rng& r) {
    for (int i = 0; i < n; ++i) {
      auto rec = record_for(static_cast<int>(r.uniform_index(108)), r.uniform(0.0, 1.0));
      agent.decide_train(std::vector<StepRecord>{rec});
    }
  };
  run_steps(a, 40, drive);
  std::stringstream ss;
  a.save(ss);
  const std::string bytes = ss.str();
  // Two fresh agents resuming from the same checkpoint under the same seed
  // stream evolve identically.
  PpoAgent b(stats, 31, opt), c(stats, 31, opt);
  std::istringstream in_b(bytes), in_c(bytes);
  b.load(in_b);
  c.load(in_c);
  REQUIRE(b.param_hash() == a.param_hash());
  Rng drive_b(555), drive_c(555);
  run_steps(b, 40, drive_b);
  run_steps(c, 40, drive_c);
  REQUIRE(b.param_hash() == c.param_hash());
  REQUIRE(b.param_hash() != a.param_hash());  // training moved the weights
}
